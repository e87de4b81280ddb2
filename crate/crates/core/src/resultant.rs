//! Sylvester matrices, resultants, the saddle-energy polynomial `g(E)` and
//! the discriminant `D(γ)` whose roots are threshold candidates.

use num_complex::Complex;
use num_traits::Zero;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{det, Dense};
use crate::model::{LaurentPolynomial, ModelFamily};
use crate::rootfind::{roots, Polynomial};
use crate::scalar::{cabs, Cplx, Real};

/// Relative cut for trailing coefficients of an interpolated `g(E)`.
pub const G_TRIM: f64 = 1e-10;
/// Relative cut for interpolated coefficients of `D(γ)`.
pub const D_TRIM: f64 = 1e-9;

const D_MIN_SAMPLES: usize = 16;
/// Largest relative noise floor accepted for the upper half of `D`'s
/// coefficients when doubling stops helping.
const D_NOISE: f64 = 1e-6;
const D_MAX_SAMPLES: usize = 1 << 12;

/// Sylvester matrix of `f` (degree `m`) and `g` (degree `n`): `n` shifted
/// rows of `f`'s coefficients followed by `m` shifted rows of `g`'s, highest
/// power first.
#[derive(Clone, Debug, PartialEq)]
pub struct SylvesterMatrix<T: Real> {
    pub entries: Dense<Cplx<T>>,
    pub deg_f: usize,
    pub deg_g: usize,
}

impl<T: Real> SylvesterMatrix<T> {
    pub fn size(&self) -> usize {
        self.entries.n()
    }

    pub fn determinant(&self) -> Cplx<T> {
        det(self.entries.clone())
    }
}

pub fn sylvester<T: Real>(f: &Polynomial<T>, g: &Polynomial<T>) -> Result<SylvesterMatrix<T>> {
    let f = f.trimmed(T::zero());
    let g = g.trimmed(T::zero());
    if f.coeffs().is_empty() || g.coeffs().is_empty() {
        return Err(Error::domain("resultant of a zero polynomial"));
    }
    Ok(sylvester_formal(&f.descending(), &g.descending()))
}

/// Sylvester matrix for coefficient lists (highest power first) whose
/// leading entries may vanish; the formal degrees are kept.
fn sylvester_formal<T: Real>(fd: &[Cplx<T>], gd: &[Cplx<T>]) -> SylvesterMatrix<T> {
    let (m, n) = (fd.len() - 1, gd.len() - 1);
    let mut s = Dense::zeros(m + n);
    for i in 0..n {
        for (k, &c) in fd.iter().enumerate() {
            s.set(i, i + k, c);
        }
    }
    for i in 0..m {
        for (k, &c) in gd.iter().enumerate() {
            s.set(n + i, i + k, c);
        }
    }
    SylvesterMatrix { entries: s, deg_f: m, deg_g: n }
}

/// `Res(f, g)` as the Sylvester determinant (LU with partial pivoting).
pub fn resultant_at<T: Real>(f: &Polynomial<T>, g: &Polynomial<T>) -> Result<Cplx<T>> {
    Ok(sylvester(f, g)?.determinant())
}

/// `g(E) = Res_β[f̃(E, β), ∂_β f̃(E, β)]`.
#[derive(Clone, Debug, PartialEq)]
pub struct SaddleEnergyPoly<T: Real> {
    /// Coefficients lowest power first.
    pub poly: Polynomial<T>,
    pub degree: usize,
    /// Radius of the interpolation circle.
    pub radius: T,
}

impl<T: Real> SaddleEnergyPoly<T> {
    /// Coefficients highest power first.
    pub fn descending(&self) -> Vec<Cplx<T>> {
        self.poly.descending()
    }

    pub fn eval(&self, e: Cplx<T>) -> Cplx<T> {
        self.poly.eval(e)
    }
}

/// Resultant of the characteristic polynomial and its β-derivative at one energy.
pub fn saddle_resultant<T: Real>(h: &LaurentPolynomial<T>, e: Cplx<T>) -> Result<Cplx<T>> {
    let f = h.char_poly(e);
    resultant_at(&f, &f.derivative())
}

/// Inverse DFT on `N` samples of a polynomial at `R·ω^j`: returns the
/// ascending coefficients `c_k = (1/N) Σ_j v_j ω^{−jk} / R^k`.
fn interpolate_circle<T: Real>(values: &[Cplx<T>], radius: T) -> Vec<Cplx<T>> {
    let n = values.len();
    let nn = T::from_usize_lossy(n);
    let mut out = Vec::with_capacity(n);
    let mut rk = T::one();
    for k in 0..n {
        let mut s = Complex::zero();
        for (j, &v) in values.iter().enumerate() {
            let ang = -T::TAU() * T::from_usize_lossy((j * k) % n) / nn;
            s += v * Complex::new(ang.cos(), ang.sin());
        }
        out.push(s / (nn * rk));
        rk *= radius;
    }
    out
}

fn circle_nodes<T: Real>(n: usize, radius: T) -> Vec<Cplx<T>> {
    (0..n)
        .map(|j| {
            let ang = T::TAU() * T::from_usize_lossy(j) / T::from_usize_lossy(n);
            Complex::new(radius * ang.cos(), radius * ang.sin())
        })
        .collect()
}

/// `β^{-lo}(H − E)` on the fixed power range `lo..=hi`, highest power first;
/// end coefficients may vanish.
fn padded_char_desc<T: Real>(h: &LaurentPolynomial<T>, (lo, hi): (i32, i32), e: Cplx<T>) -> Vec<Cplx<T>> {
    (lo..=hi).rev().map(|n| if n == 0 { h.coeff(0) - e } else { h.coeff(n) }).collect()
}

fn desc_derivative<T: Real>(d: &[Cplx<T>]) -> Vec<Cplx<T>> {
    let m = d.len() - 1;
    d[..m].iter().enumerate().map(|(i, &c)| c * T::from_usize_lossy(m - i)).collect()
}

/// Ascending coefficients of `g(E)` at its formal degree `hi − lo`,
/// untrimmed, interpolated on a circle of the given radius. Keeping the
/// degree fixed makes the result polynomial in the hoppings even where an
/// end hopping vanishes.
fn saddle_energy_coeffs<T: Real>(h: &LaurentPolynomial<T>, range: (i32, i32), radius: T) -> Vec<Cplx<T>> {
    let deg = (range.1 - range.0) as usize;
    // The Sylvester determinant has degree at most 2·deg − 1 in E, so 2·deg
    // nodes interpolate it exactly; the true degree is deg.
    let nodes = circle_nodes(2 * deg, radius);
    let vals: Vec<Cplx<T>> = nodes
        .iter()
        .map(|&e| {
            let f = padded_char_desc(h, range, e);
            sylvester_formal(&f, &desc_derivative(&f)).determinant()
        })
        .collect();
    let mut c = interpolate_circle(&vals, radius);
    c.truncate(deg + 1);
    c
}

/// `g(E)` by evaluation–interpolation on a circle of radius `2 Σ|h_n|`.
pub fn saddle_energy_poly<T: Real>(h: &LaurentPolynomial<T>) -> Result<SaddleEnergyPoly<T>> {
    let radius = T::of(2.0) * h.abs_sum();
    saddle_energy_poly_on(h, radius)
}

pub fn saddle_energy_poly_on<T: Real>(h: &LaurentPolynomial<T>, radius: T) -> Result<SaddleEnergyPoly<T>> {
    let deg = h.l()? + h.r()?;
    let nodes = circle_nodes(2 * deg, radius);
    let vals: Vec<Cplx<T>> = nodes.iter().map(|&e| saddle_resultant(h, e)).collect::<Result<_>>()?;
    let c = interpolate_circle(&vals, radius);
    let scaled: Vec<T> = c.iter().enumerate().map(|(k, &z)| cabs(z) * radius.powi(k as i32)).collect();
    let max = scaled.iter().fold(T::zero(), |m, &x| m.max(x));
    if !(max > T::zero()) {
        return Err(Error::numerical("saddle-energy interpolation has rank zero; try a larger sample circle"));
    }
    let keep = scaled.iter().rposition(|&x| x > T::of(G_TRIM) * max).unwrap_or(0);
    let poly = Polynomial::new(c[..=keep].to_vec());
    Ok(SaddleEnergyPoly { degree: keep, poly, radius })
}

/// `D(γ) = Res_E[g_γ, ∂_E g_γ]` in interpolated form.
#[derive(Clone, Debug, PartialEq)]
pub struct GammaDiscriminant<T: Real> {
    /// `D(γ) / γ^m` (lowest power first), the exact zero at the origin removed.
    pub deflated: Polynomial<T>,
    /// Multiplicity `m` of the root at `γ = 0`.
    pub zero_multiplicity: usize,
    /// Nonzero complex roots of `D`.
    pub roots: Vec<Cplx<T>>,
    /// Number of interpolation samples used.
    pub samples: usize,
    pub radius: T,
    /// `g` does not depend on γ; there is nothing to solve.
    pub degenerate: bool,
}

impl<T: Real> GammaDiscriminant<T> {
    /// Degree of `D` including the zero root.
    pub fn degree(&self) -> usize {
        self.zero_multiplicity + self.deflated.len_degree()
    }

    /// Full coefficient list of `D` (lowest power first).
    pub fn coefficients(&self) -> Vec<Cplx<T>> {
        let mut c = vec![Complex::zero(); self.zero_multiplicity];
        c.extend_from_slice(self.deflated.coeffs());
        c
    }

    pub fn eval(&self, gamma: Cplx<T>) -> Cplx<T> {
        self.deflated.eval(gamma) * gamma.powi(self.zero_multiplicity as i32)
    }
}

/// Direct evaluation of `D(γ)` at one (complex) γ, using the energy circle
/// `radius_e` for the inner interpolation.
pub fn discriminant_at<T: Real>(family: &ModelFamily<T>, gamma: Cplx<T>, radius_e: T) -> Result<Cplx<T>> {
    let range = family.power_range();
    if range.0 > -1 || range.1 < 1 {
        return Err(Error::domain("model needs both negative and positive powers"));
    }
    let h = family.at_complex(gamma);
    let mut g = saddle_energy_coeffs(&h, range, radius_e);
    g.reverse();
    Ok(sylvester_formal(&g, &desc_derivative(&g)).determinant())
}

/// Energy interpolation radius for a family over a γ window.
pub fn energy_radius<T: Real>(family: &ModelFamily<T>, gamma_abs: T) -> T {
    T::of(2.0) * family.base.abs_sum() + gamma_abs * family.gamma_coupling.abs_sum()
}

/// Interpolates `D(γ)` on circles of radius `max|γ_window|`, doubling the
/// sample count until the upper half of the scaled coefficients is
/// negligible, then strips the exact `γ^m` factor and finds all roots.
pub fn discriminant_gamma<T: Real>(family: &ModelFamily<T>, window: (T, T)) -> Result<GammaDiscriminant<T>> {
    family.validate()?;
    let radius = window.0.abs().max(window.1.abs());
    if !(radius > T::zero()) || !radius.is_finite() {
        return Err(Error::domain("γ window must have a positive finite extent"));
    }
    if family.gamma_coupling.is_zero() {
        return Ok(GammaDiscriminant {
            deflated: Polynomial::new(Vec::new()),
            zero_multiplicity: 0,
            roots: Vec::new(),
            samples: 0,
            radius,
            degenerate: true,
        });
    }
    let radius_e = energy_radius(family, radius);
    let mut n = D_MIN_SAMPLES;
    let mut prev_top = T::zero();
    loop {
        let nodes = circle_nodes(n, radius);
        let vals: Vec<Result<Cplx<T>>> = nodes.par_iter().map(|&z| discriminant_at(family, z, radius_e)).collect();
        let vals: Vec<Cplx<T>> = vals.into_iter().collect::<Result<_>>()?;
        let c = interpolate_circle(&vals, radius);
        let scaled: Vec<T> = c.iter().enumerate().map(|(k, &z)| cabs(z) * radius.powi(k as i32)).collect();
        let max = scaled.iter().fold(T::zero(), |m, &x| m.max(x));
        if !(max > T::zero()) {
            return Ok(GammaDiscriminant {
                deflated: Polynomial::new(Vec::new()),
                zero_multiplicity: 0,
                roots: Vec::new(),
                samples: n,
                radius,
                degenerate: true,
            });
        }
        if !max.is_finite() || scaled.iter().any(|x| !x.is_finite()) {
            return Err(Error::numerical("D(γ) interpolation overflowed"));
        }
        let top = scaled[n / 2..].iter().fold(T::zero(), |m, &x| m.max(x));
        // Once the upper half is pure rounding noise it stops shrinking with
        // n; the noise level then sets the trim.
        let stalled = n >= 4 * D_MIN_SAMPLES && top < T::of(D_NOISE) * max && top > T::of(0.25) * prev_top;
        let cut = if stalled { (T::of(D_TRIM) * max).max(T::of(10.0) * top) } else { T::of(D_TRIM) * max };
        prev_top = top;
        if top < cut {
            let keep = scaled.iter().rposition(|&x| x > cut).unwrap_or(0);
            let low = scaled.iter().position(|&x| x > cut).unwrap_or(0);
            let deflated = Polynomial::new(c[low..=keep].to_vec());
            let rts = if deflated.len_degree() > 0 { roots(&deflated)?.roots } else { Vec::new() };
            return Ok(GammaDiscriminant { deflated, zero_multiplicity: low, roots: rts, samples: n, radius, degenerate: false });
        }
        n *= 2;
        if n > D_MAX_SAMPLES {
            return Err(Error::numerical("D(γ) degree detection did not converge"));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex<f64> {
        Complex::new(re, 0.0)
    }

    #[test]
    fn linear_resultant() {
        let f = Polynomial::from_real(&[-2.0, 1.0]);
        let g = Polynomial::from_real(&[-5.0, 1.0]);
        assert!((resultant_at(&f, &g).unwrap() - c(-3.0)).norm() < 1e-14);
        let r = resultant_at(&Polynomial::from_real(&[-3.0, 1.0]), &Polynomial::from_real(&[-3.0, 1.0])).unwrap();
        assert!(r.norm() < 1e-14);
        let r = resultant_at(&Polynomial::from_real(&[-1.0, 0.0, 1.0]), &Polynomial::from_real(&[-1.0, 1.0])).unwrap();
        assert!(r.norm() < 1e-14);
    }

    #[test]
    fn sylvester_shape() {
        let h = ModelFamily::third_neighbor(1.0, 0.2, 0.2, 0.05).hamiltonian();
        let f = h.char_poly(c(0.3));
        let s = sylvester(&f, &f.derivative()).unwrap();
        assert_eq!(s.size(), 11);
        assert_eq!(s.entries.get(0, 0), c(0.2));
        assert_eq!(s.entries.get(4, 4), c(0.2));
        assert!((s.entries.get(5, 0) - c(1.2)).norm() < 1e-15);
        assert!((s.entries.get(10, 5) - c(1.2)).norm() < 1e-15);
        assert_eq!(s.entries.get(5, 6), Complex::zero());
    }

    #[test]
    fn hatano_nelson_g() {
        let h = ModelFamily::hatano_nelson(1.0, 0.6).hamiltonian();
        let g = saddle_energy_poly(&h).unwrap();
        assert_eq!(g.degree, 2);
        let d = g.descending();
        let ratio = d[2] / d[0];
        assert!((ratio - c(-2.56)).norm() < 1e-12, "{ratio}");
        assert!((d[1] / d[0]).norm() < 1e-12);
    }
}
