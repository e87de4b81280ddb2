//! Transfer matrices of nearest-neighbor chains. Band-edge saddles of
//! `H(β) = t_L β + t_R/β` are exceptional points of `T(E)`.

use num_complex::Complex;

use crate::error::{Error, Result};

/// `T(E) = [[0, 1], [−t_R/t_L, E/t_L]]`, whose eigenvalues solve
/// `t_L β + t_R β^{-1} = E`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransferMatrix {
    pub entries: [[Complex<f64>; 2]; 2],
    pub t_l: f64,
    pub t_r: f64,
    pub energy: Complex<f64>,
}

pub fn transfer_matrix(t_l: f64, t_r: f64, e: Complex<f64>) -> Result<TransferMatrix> {
    if t_l == 0.0 || !t_l.is_finite() || !t_r.is_finite() {
        return Err(Error::domain("t_L must be nonzero and finite: one-way hopping has no transfer form"));
    }
    let z = Complex::new(0.0, 0.0);
    let entries = [[z, Complex::new(1.0, 0.0)], [Complex::new(-t_r / t_l, 0.0), e / t_l]];
    Ok(TransferMatrix { entries, t_l, t_r, energy: e })
}

impl TransferMatrix {
    pub fn det(&self) -> Complex<f64> {
        let m = &self.entries;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn trace(&self) -> Complex<f64> {
        self.entries[0][0] + self.entries[1][1]
    }

    /// `tr² − 4 det`; zero exactly at an exceptional point.
    pub fn discriminant(&self) -> Complex<f64> {
        let t = self.trace();
        t * t - self.det() * 4.0
    }

    /// Both eigenvalues, the root of larger modulus first.
    pub fn eigenvalues(&self) -> [Complex<f64>; 2] {
        let t = self.trace();
        let s = self.discriminant().sqrt();
        // Pick the sign that avoids cancellation, then use the product.
        let q = if (t.conj() * s).re >= 0.0 { (t + s) * 0.5 } else { (t - s) * 0.5 };
        if q.norm() == 0.0 {
            return [q, q];
        }
        [q, self.det() / q]
    }

    /// Normalized eigenvector for `λ`; the first row forces `v = (1, λ)`.
    pub fn eigenvector(&self, lambda: Complex<f64>) -> [Complex<f64>; 2] {
        let n = (1.0 + lambda.norm_sqr()).sqrt();
        [Complex::new(1.0 / n, 0.0), lambda / n]
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Defectiveness {
    pub eigenvalue_gap: f64,
    /// Principal angle between the two normalized eigenvectors.
    pub eigenvector_angle: f64,
}

impl Defectiveness {
    pub fn is_exceptional(&self, gap_tol: f64, angle_tol: f64) -> bool {
        self.eigenvalue_gap < gap_tol && self.eigenvector_angle < angle_tol
    }
}

pub fn ep_defectiveness(t: &TransferMatrix) -> Defectiveness {
    let [a, b] = t.eigenvalues();
    let (u, v) = (t.eigenvector(a), t.eigenvector(b));
    let overlap = (u[0].conj() * v[0] + u[1].conj() * v[1]).norm().min(1.0);
    Defectiveness { eigenvalue_gap: (a - b).norm(), eigenvector_angle: overlap.acos() }
}

/// Real energies in `[emin, emax]` where `T(E)` is defective: sign changes
/// or minima of `|tr² − 4 det|` on an `n`-point grid, refined by secant steps
/// on the discriminant.
pub fn locate_eps(t_l: f64, t_r: f64, emin: f64, emax: f64, n: usize) -> Result<Vec<f64>> {
    if n < 3 || !(emin < emax) {
        return Err(Error::domain("energy grid needs emin < emax and at least 3 samples"));
    }
    let disc = |e: f64| -> Result<Complex<f64>> { Ok(transfer_matrix(t_l, t_r, Complex::new(e, 0.0))?.discriminant()) };
    let grid: Vec<f64> = (0..n).map(|k| emin + (emax - emin) * k as f64 / (n - 1) as f64).collect();
    let vals: Vec<f64> = grid.iter().map(|&e| disc(e).map(|d| d.norm())).collect::<Result<_>>()?;
    let step = (emax - emin) / (n - 1) as f64;
    let mut out: Vec<f64> = Vec::new();
    for k in 0..n {
        let left = if k > 0 { vals[k - 1] } else { f64::INFINITY };
        let right = if k + 1 < n { vals[k + 1] } else { f64::INFINITY };
        if !(vals[k] <= left && vals[k] <= right) {
            continue;
        }
        let (mut x0, mut x1) = (grid[k], grid[k] + 0.5 * step);
        let (mut f0, mut f1) = (disc(x0)?, disc(x1)?);
        for _ in 0..100 {
            let den = f1 - f0;
            if den.norm() == 0.0 {
                break;
            }
            let x2 = x1 - (f1 * (x1 - x0) / den).re;
            x0 = x1;
            f0 = f1;
            x1 = x2;
            f1 = disc(x1)?;
            if (x1 - x0).abs() <= 1e-15 * x1.abs().max(1.0) {
                break;
            }
        }
        let tol = 1e-10 * (t_r / t_l).abs().max(1.0);
        if f1.norm() < tol && x1 >= emin - step && x1 <= emax + step && !out.iter().any(|&e| (e - x1).abs() < 1e-9) {
            out.push(x1);
        }
    }
    out.sort_by(|a, b| a.total_cmp(b));
    Ok(out)
}
