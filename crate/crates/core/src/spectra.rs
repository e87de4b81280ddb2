//! Open-boundary matrices, their spectra, and phase-diagram sweeps.

use num_complex::Complex;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::extended::{DoubleDouble, QuadDouble};
use crate::gbz::{agbz_sweep, gbz_filter};
use crate::linalg::{eigenvalues_complex, eigenvalues_real, inverse_iteration, Dense};
use crate::model::{LaurentPolynomial, ModelFamily};
use crate::scalar::{cast_complex, cast_real, Cplx, Real};

/// Imaginary-part cut for counting complex eigenvalues.
pub const IMAG_TOL: f64 = 1e-10;

/// Sweep resolution used when estimating the similarity scale from the GBZ.
const SCALE_N_PHI: usize = 400;

/// Banded Toeplitz matrix of an `L`-site open chain.
///
/// Entry `(x, x')` is `h_{x'−x}`, so a bulk eigenvector has the form
/// `ψ_x ∝ β^x` with `H(β) = E`, and the skin factor of the Hatano–Nelson
/// chain is `((t₁−γ)/(t₁+γ))^{x/2}`.
#[derive(Clone, Debug, PartialEq)]
pub struct ObcMatrix<T: Real> {
    pub size: usize,
    pub symbol: LaurentPolynomial<T>,
    /// Similarity scale: the spectrum is computed from `D⁻¹ M D` with
    /// `D = diag(r^x)`.
    pub scale_r: Option<T>,
}

impl<T: Real> ObcMatrix<T> {
    pub fn entry(&self, x: usize, xp: usize) -> Cplx<T> {
        self.symbol.coeff(xp as i32 - x as i32)
    }

    pub fn with_scale(mut self, r: T) -> Self {
        self.scale_r = Some(r);
        self
    }

    pub fn dense(&self) -> Dense<Cplx<T>> {
        Dense::from_fn(self.size, |x, xp| self.entry(x, xp))
    }

    /// The matrix actually diagonalized: the Toeplitz matrix of `H(rβ)`.
    pub fn scaled_dense(&self) -> Dense<Cplx<T>> {
        match self.scale_r {
            None => self.dense(),
            Some(r) => {
                let sym = self.symbol.rescale_argument(r);
                Dense::from_fn(self.size, |x, xp| sym.coeff(xp as i32 - x as i32))
            }
        }
    }

    pub fn is_real(&self) -> bool {
        self.symbol.is_real()
    }
}

/// Builds the OBC matrix of `h` on `L` sites.
pub fn obc_matrix<T: Real>(h: &LaurentPolynomial<T>, size: usize) -> Result<ObcMatrix<T>> {
    if size == 0 {
        return Err(Error::domain("chain length L must be positive"));
    }
    Ok(ObcMatrix { size, symbol: h.clone(), scale_r: None })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumResult<T: Real> {
    /// Sorted by real part, then imaginary part.
    #[serde(skip)]
    pub eigenvalues: Vec<Cplx<T>>,
    pub size: usize,
    pub complex_fraction: f64,
    pub imag_tolerance: f64,
}

impl<T: Real> SpectrumResult<T> {
    fn new(mut eigenvalues: Vec<Cplx<T>>, size: usize, imag_tolerance: f64) -> Self {
        sort_complex(&mut eigenvalues);
        let p = fraction(&eigenvalues, imag_tolerance);
        Self { eigenvalues, size, complex_fraction: p, imag_tolerance }
    }

    pub fn with_imag_tolerance(mut self, tol: f64) -> Self {
        self.complex_fraction = fraction(&self.eigenvalues, tol);
        self.imag_tolerance = tol;
        self
    }

    pub fn to_f64(&self) -> SpectrumResult<f64> {
        SpectrumResult {
            eigenvalues: self.eigenvalues.iter().map(|&z| cast_complex(z)).collect(),
            size: self.size,
            complex_fraction: self.complex_fraction,
            imag_tolerance: self.imag_tolerance,
        }
    }
}

pub(crate) fn sort_complex<T: Real>(v: &mut [Cplx<T>]) {
    v.sort_by(|a, b| {
        a.re.partial_cmp(&b.re).unwrap_or(std::cmp::Ordering::Equal).then(a.im.partial_cmp(&b.im).unwrap_or(std::cmp::Ordering::Equal))
    });
}

fn fraction<T: Real>(ev: &[Cplx<T>], tol: f64) -> f64 {
    if ev.is_empty() {
        return 0.0;
    }
    let tol = T::of(tol);
    ev.iter().filter(|z| z.im.abs() > tol).count() as f64 / ev.len() as f64
}

/// All eigenvalues of the (optionally similarity-scaled) OBC matrix.
pub fn obc_spectrum<T: Real>(m: &ObcMatrix<T>) -> Result<SpectrumResult<T>> {
    let a = m.scaled_dense();
    let ev = if m.is_real() {
        eigenvalues_real(&a.map(|z| z.re))?
    } else {
        eigenvalues_complex(&a)?
    };
    Ok(SpectrumResult::new(ev, m.size, IMAG_TOL))
}

/// Right eigenvector of the unscaled OBC matrix for eigenvalue `e`.
pub fn obc_eigenvector<T: Real>(m: &ObcMatrix<T>, e: Cplx<T>) -> Result<Vec<Cplx<T>>> {
    inverse_iteration(&m.dense(), e)
}

/// `P`: fraction of eigenvalues with `|Im E| > tol`.
pub fn complex_fraction<T: Real>(sr: &SpectrumResult<T>, tol: f64) -> f64 {
    fraction(&sr.eigenvalues, tol)
}

/// `H(e^{2πim/N})` for `m = 0 … N−1`.
pub fn pbc_spectrum<T: Real>(h: &LaurentPolynomial<T>, n: usize) -> Result<Vec<Cplx<T>>> {
    if n == 0 {
        return Err(Error::domain("PBC sample count must be positive"));
    }
    Ok((0..n)
        .map(|m| {
            let k = T::TAU() * T::from_usize_lossy(m) / T::from_usize_lossy(n);
            h.value(Complex::new(k.cos(), k.sin()))
        })
        .collect())
}

/// Working precision of the eigensolver.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    Double,
    /// About 106 bits.
    DoubleDouble,
    /// About 212 bits; needed for reliable complex-fraction counts on a few
    /// hundred sites when the GBZ is far from a circle.
    Quad,
}

impl std::str::FromStr for Precision {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "double" | "f64" => Ok(Precision::Double),
            "dd" | "double-double" => Ok(Precision::DoubleDouble),
            "quad" | "qd" | "quad-double" => Ok(Precision::Quad),
            _ => Err(Error::domain(format!("unknown precision '{s}' (double, dd, quad)"))),
        }
    }
}

/// Similarity scaling policy.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum ScaleMode {
    None,
    /// Geometric mean of the GBZ radius, see [`default_scale_r`].
    Auto,
    Fixed(f64),
}

/// Default similarity scale: geometric mean of `|β|` over the GBZ, falling
/// back to `√(Σ|h_{−n}| / Σ|h_{+n}|)` when the GBZ is empty.
pub fn default_scale_r(h: &LaurentPolynomial<f64>) -> f64 {
    let from_gbz = agbz_sweep(h, SCALE_N_PHI)
        .and_then(|a| gbz_filter(&a, h))
        .ok()
        .and_then(|g| g.mean_radius())
        .filter(|r| r.is_finite() && *r > 0.0);
    from_gbz.unwrap_or_else(|| {
        let (mut neg, mut pos) = (0.0, 0.0);
        for (n, z) in h.terms() {
            if n < 0 {
                neg += z.norm();
            } else if n > 0 {
                pos += z.norm();
            }
        }
        if neg > 0.0 && pos > 0.0 {
            (neg / pos).sqrt()
        } else {
            1.0
        }
    })
}

fn solve_in<T: Real>(h: &LaurentPolynomial<f64>, size: usize, r: Option<f64>) -> Result<SpectrumResult<f64>> {
    let mut m = obc_matrix(&h.cast::<T>(), size)?;
    if let Some(r) = r {
        m = m.with_scale(cast_real(r));
    }
    Ok(obc_spectrum(&m)?.to_f64())
}

/// OBC eigenvalues of a double-precision model, computed at the requested
/// working precision.
pub fn obc_eigenvalues(h: &LaurentPolynomial<f64>, size: usize, scale: ScaleMode, precision: Precision) -> Result<SpectrumResult<f64>> {
    let r = match scale {
        ScaleMode::None => None,
        ScaleMode::Auto => Some(default_scale_r(h)),
        ScaleMode::Fixed(r) => {
            if !(r > 0.0 && r.is_finite()) {
                return Err(Error::domain("scale r must be positive"));
            }
            Some(r)
        }
    };
    match precision {
        Precision::Double => solve_in::<f64>(h, size, r),
        Precision::DoubleDouble => solve_in::<DoubleDouble>(h, size, r),
        Precision::Quad => solve_in::<QuadDouble>(h, size, r),
    }
}

/// Options shared by the complex-fraction sweeps.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SweepOptions {
    pub size: usize,
    pub imag_tol: f64,
    pub scale: ScaleMode,
    pub precision: Precision,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self { size: 200, imag_tol: IMAG_TOL, scale: ScaleMode::Auto, precision: Precision::Quad }
    }
}

/// Complex fraction of one family instance.
pub fn complex_fraction_at(family: &ModelFamily<f64>, opts: &SweepOptions) -> Result<f64> {
    let h = family.hamiltonian();
    let sr = obc_eigenvalues(&h, opts.size, opts.scale, opts.precision)?;
    Ok(complex_fraction(&sr, opts.imag_tol))
}

/// `P` on a `(parameter, γ)` grid. Failed cells are `None`; the sweep goes on.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PhaseDiagram {
    pub param: String,
    pub param_values: Vec<f64>,
    pub gammas: Vec<f64>,
    /// `p[i][j]` at `param_values[i]`, `gammas[j]`.
    pub p: Vec<Vec<Option<f64>>>,
}

pub fn phase_diagram(
    family: &ModelFamily<f64>,
    gammas: &[f64],
    param: &str,
    param_values: &[f64],
    opts: &SweepOptions,
) -> Result<PhaseDiagram> {
    if gammas.is_empty() || param_values.is_empty() {
        return Err(Error::domain("phase diagram grids must be nonempty"));
    }
    let rows: Vec<Result<ModelFamily<f64>>> = param_values.iter().map(|&v| family.with_parameter(param, v)).collect();
    let rows: Vec<ModelFamily<f64>> = rows.into_iter().collect::<Result<_>>()?;
    let cells: Vec<(usize, usize)> = (0..rows.len()).flat_map(|i| (0..gammas.len()).map(move |j| (i, j))).collect();
    let vals: Vec<Option<f64>> = cells
        .par_iter()
        .map(|&(i, j)| complex_fraction_at(&rows[i].with_gamma(gammas[j]), opts).ok())
        .collect();
    let p = vals.chunks(gammas.len()).map(|c| c.to_vec()).collect();
    Ok(PhaseDiagram { param: param.to_string(), param_values: param_values.to_vec(), gammas: gammas.to_vec(), p })
}

/// Largest distance from a point of `a` to its nearest point of `b`.
pub fn hausdorff_one_sided<T: Real>(a: &[Cplx<T>], b: &[Cplx<T>]) -> T {
    a.iter().fold(T::zero(), |m, &x| {
        let d = b.iter().fold(T::infinity(), |d, &y| d.min((x - y).norm_sqr()));
        m.max(d.sqrt())
    })
}

/// Eigenvalues whose imaginary part is within `tol` are treated as real.
pub fn is_real_spectrum<T: Real>(sr: &SpectrumResult<T>, tol: f64) -> bool {
    complex_fraction(sr, tol).is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hn_small_matrix_layout() {
        let h = ModelFamily::hatano_nelson(1.0, 0.6).hamiltonian();
        let m = obc_matrix(&h, 3).unwrap().dense();
        let want = [[0.0, 1.6, 0.0], [0.4, 0.0, 1.6], [0.0, 0.4, 0.0]];
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(m.get(i, j), Complex::new(want[i][j], 0.0));
            }
        }
        let one = obc_matrix(&ModelFamily::third_neighbor(1.0, 0.2, 0.2, 0.1).hamiltonian(), 1).unwrap();
        assert_eq!(one.dense().get(0, 0), Complex::new(0.0, 0.0));
    }

    #[test]
    fn pbc_plug_in() {
        let h = ModelFamily::hatano_nelson(1.0, 0.6).hamiltonian();
        let s = pbc_spectrum(&h, 4).unwrap();
        let want = [Complex::new(2.0, 0.0), Complex::new(0.0, 1.2), Complex::new(-2.0, 0.0), Complex::new(0.0, -1.2)];
        for (a, b) in s.iter().zip(&want) {
            assert!((a - b).norm() < 1e-14);
        }
    }
}
