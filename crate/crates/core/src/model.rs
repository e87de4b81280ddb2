//! Laurent-polynomial Hamiltonians and γ-parameterized model families.

use std::collections::BTreeMap;
use std::ops::{Add, Mul};
use std::path::Path;

use num_complex::Complex;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rootfind::Polynomial;
use crate::scalar::{cabs, cast_complex, cast_real, Cplx, Real};

/// Coefficients below this fraction of the largest one count as zero at the
/// ends of the power range.
pub const NONZERO_TOL: f64 = 1e-12;

/// `H(β) = Σ h_n β^n` for `n` in `[min_power, max_power]`, stored densely.
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentPolynomial<T: Real> {
    min_power: i32,
    coeffs: Vec<Cplx<T>>,
}

impl<T: Real> LaurentPolynomial<T> {
    /// Dense constructor. Negligible coefficients at either end are dropped so
    /// that the stored range is the effective `[-l, r]`.
    pub fn new(min_power: i32, coeffs: Vec<Cplx<T>>) -> Self {
        let max = coeffs.iter().fold(T::zero(), |m, &z| m.max(cabs(z)));
        let cut = max * T::of(NONZERO_TOL);
        let lo = coeffs.iter().position(|&z| cabs(z) > cut);
        match lo {
            None => Self { min_power: 0, coeffs: Vec::new() },
            Some(lo) => {
                let hi = coeffs.iter().rposition(|&z| cabs(z) > cut).unwrap_or(lo);
                Self { min_power: min_power + lo as i32, coeffs: coeffs[lo..=hi].to_vec() }
            }
        }
    }

    /// Sparse constructor from `(power, coefficient)` terms; repeated powers add.
    pub fn from_terms(terms: impl IntoIterator<Item = (i32, Cplx<T>)>) -> Self {
        let mut map: BTreeMap<i32, Cplx<T>> = BTreeMap::new();
        for (n, c) in terms {
            *map.entry(n).or_insert_with(Complex::zero) += c;
        }
        let (Some(&lo), Some(&hi)) = (map.keys().next(), map.keys().next_back()) else {
            return Self { min_power: 0, coeffs: Vec::new() };
        };
        let coeffs = (lo..=hi).map(|n| map.get(&n).copied().unwrap_or_else(Complex::zero)).collect();
        Self::new(lo, coeffs)
    }

    pub fn from_real_terms(terms: &[(i32, T)]) -> Self {
        Self::from_terms(terms.iter().map(|&(n, c)| (n, Complex::new(c, T::zero()))))
    }

    pub fn zero() -> Self {
        Self { min_power: 0, coeffs: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn min_power(&self) -> i32 {
        self.min_power
    }

    pub fn max_power(&self) -> i32 {
        self.min_power + self.coeffs.len() as i32 - 1
    }

    pub fn coeffs(&self) -> &[Cplx<T>] {
        &self.coeffs
    }

    /// `h_n`, zero outside the stored range.
    pub fn coeff(&self, n: i32) -> Cplx<T> {
        let k = n - self.min_power;
        if k < 0 || k as usize >= self.coeffs.len() {
            Complex::zero()
        } else {
            self.coeffs[k as usize]
        }
    }

    /// Nonzero terms as `(n, h_n)`.
    pub fn terms(&self) -> impl Iterator<Item = (i32, Cplx<T>)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, z)| !z.is_zero())
            .map(move |(k, &z)| (self.min_power + k as i32, z))
    }

    /// Checks `l ≥ 1` and `r ≥ 1`.
    pub fn validate(&self) -> Result<()> {
        if self.is_zero() {
            return Err(Error::domain("Hamiltonian has no nonzero coefficient"));
        }
        if self.min_power > -1 {
            return Err(Error::domain("Hamiltonian needs a negative power (l >= 1)"));
        }
        if self.max_power() < 1 {
            return Err(Error::domain("Hamiltonian needs a positive power (r >= 1)"));
        }
        Ok(())
    }

    /// Hopping range to the left, `l = -min_power`.
    pub fn l(&self) -> Result<usize> {
        self.validate()?;
        Ok((-self.min_power) as usize)
    }

    /// Hopping range to the right, `r = max_power`.
    pub fn r(&self) -> Result<usize> {
        self.validate()?;
        Ok(self.max_power() as usize)
    }

    /// `l` clamped at zero, for routines that also accept invalid ranges.
    fn l_raw(&self) -> usize {
        (-self.min_power).max(0) as usize
    }

    /// `H(β)`; fails at `β = 0` when negative powers are present.
    pub fn evaluate(&self, beta: Cplx<T>) -> Result<Cplx<T>> {
        if beta.is_zero() && self.min_power < 0 {
            return Err(Error::domain("H(beta) diverges at beta = 0"));
        }
        Ok(self.value(beta))
    }

    /// Unchecked evaluation: Horner on `β^l H` as a polynomial, then divided by `β^l`.
    pub fn value(&self, beta: Cplx<T>) -> Cplx<T> {
        let p = self.coeffs.iter().rev().fold(Cplx::<T>::zero(), |acc, &c| acc * beta + c);
        if self.min_power >= 0 {
            p * beta.powi(self.min_power)
        } else {
            p / beta.powi(-self.min_power)
        }
    }

    /// `Σ n h_n β^{n-1}` with power range `[min_power - 1, max_power - 1]`.
    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, &c)| c * T::from_i64_lossy((self.min_power + k as i32) as i64))
            .collect();
        Self::new(self.min_power - 1, coeffs)
    }

    /// Value of the `k`-th derivative at `β`.
    pub fn derivative_value(&self, beta: Cplx<T>, k: usize) -> Cplx<T> {
        let mut acc = Complex::zero();
        for (n, c) in self.terms() {
            let mut f = T::one();
            for j in 0..k {
                f *= T::from_i64_lossy((n - j as i32) as i64);
            }
            if f.is_zero() {
                continue;
            }
            acc += c * f * beta.powi(n - k as i32);
        }
        acc
    }

    /// `f̃(E, β) = β^l (H(β) − E)` as a polynomial in β of degree `l + r`.
    pub fn char_poly(&self, e: Cplx<T>) -> Polynomial<T> {
        let l = self.l_raw();
        let shift = self.min_power + l as i32;
        let len = (self.max_power() + l as i32).max(l as i32) as usize + 1;
        let mut c = vec![Complex::zero(); len];
        for (k, &h) in self.coeffs.iter().enumerate() {
            c[(shift + k as i32) as usize] += h;
        }
        c[l] -= e;
        Polynomial::new(c)
    }

    /// `β^{l+1} ∂_β H(β) = Σ n h_n β^{n+l}`, a polynomial of degree `l + r`
    /// whose roots are the saddle points.
    pub fn saddle_poly(&self) -> Polynomial<T> {
        let l = self.l_raw() as i32;
        let len = (self.max_power() + l).max(0) as usize + 1;
        let mut c = vec![Complex::zero(); len];
        for (n, h) in self.terms() {
            if n != 0 {
                c[(n + l) as usize] += h * T::from_i64_lossy(n as i64);
            }
        }
        Polynomial::new(c)
    }

    /// `Σ |h_n|`.
    pub fn abs_sum(&self) -> T {
        self.coeffs.iter().fold(T::zero(), |s, &z| s + cabs(z))
    }

    pub fn max_abs(&self) -> T {
        self.coeffs.iter().fold(T::zero(), |m, &z| m.max(cabs(z)))
    }

    /// `Σ n² |h_n|`, the scale for derivative-vanishing tests.
    pub fn curvature_scale(&self) -> T {
        self.terms().fold(T::zero(), |s, (n, z)| s + T::from_i64_lossy((n * n) as i64) * cabs(z))
    }

    /// `H(ρβ)`: coefficients `h_n ρ^n`. This is the symbol of the OBC matrix
    /// after the similarity transform `diag(ρ^x)`.
    pub fn rescale_argument(&self, rho: T) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, &c)| c * rho.powi(self.min_power + k as i32))
            .collect();
        Self::new(self.min_power, coeffs)
    }

    pub fn is_real(&self) -> bool {
        self.coeffs.iter().all(|z| z.im.is_zero())
    }

    pub fn realness_certificate(&self, tol: T) -> RealnessCertificate {
        let max_imag = self.coeffs.iter().fold(T::zero(), |m, &z| m.max(z.im.abs()));
        let scale = self.max_abs().max(T::min_positive_value());
        RealnessCertificate { is_pt_symmetric: max_imag <= tol * scale, max_imag_coefficient: max_imag.as_f64() }
    }

    /// Converts the coefficients to another scalar type.
    pub fn cast<U: Real>(&self) -> LaurentPolynomial<U> {
        LaurentPolynomial { min_power: self.min_power, coeffs: self.coeffs.iter().map(|&z| cast_complex(z)).collect() }
    }
}

impl<T: Real> Add for &LaurentPolynomial<T> {
    type Output = LaurentPolynomial<T>;
    fn add(self, rhs: Self) -> LaurentPolynomial<T> {
        LaurentPolynomial::from_terms(self.terms().chain(rhs.terms()))
    }
}

impl<T: Real> Mul<Cplx<T>> for &LaurentPolynomial<T> {
    type Output = LaurentPolynomial<T>;
    fn mul(self, c: Cplx<T>) -> LaurentPolynomial<T> {
        LaurentPolynomial::new(self.min_power, self.coeffs.iter().map(|&z| z * c).collect())
    }
}

/// Outcome of the generalized PT test `K H K = H`: every real-space hopping real.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RealnessCertificate {
    pub is_pt_symmetric: bool,
    pub max_imag_coefficient: f64,
}

/// `H(β; γ) = Σ (a_n + γ b_n) β^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelFamily<T: Real> {
    pub base: LaurentPolynomial<T>,
    pub gamma_coupling: LaurentPolynomial<T>,
    pub gamma: T,
}

impl<T: Real> ModelFamily<T> {
    pub fn new(base: LaurentPolynomial<T>, gamma_coupling: LaurentPolynomial<T>, gamma: T) -> Self {
        Self { base, gamma_coupling, gamma }
    }

    /// Third-neighbor chain with asymmetric nearest-neighbor hopping:
    /// `a_{±1}=t1, a_{±2}=t2, a_{±3}=t3, b_{±1}=±1`.
    pub fn third_neighbor(t1: T, t2: T, t3: T, gamma: T) -> Self {
        let base = LaurentPolynomial::from_real_terms(&[(-3, t3), (-2, t2), (-1, t1), (1, t1), (2, t2), (3, t3)]);
        Self::new(base, Self::antisymmetric_nn(), gamma)
    }

    /// Second-neighbor variant (`t3 = 0`).
    pub fn second_neighbor(t1: T, t2: T, gamma: T) -> Self {
        Self::third_neighbor(t1, t2, T::zero(), gamma)
    }

    /// Hatano–Nelson chain, `h_{+1} = t1 + γ`, `h_{-1} = t1 − γ`.
    pub fn hatano_nelson(t1: T, gamma: T) -> Self {
        Self::third_neighbor(t1, T::zero(), T::zero(), gamma)
    }

    fn antisymmetric_nn() -> LaurentPolynomial<T> {
        LaurentPolynomial::from_real_terms(&[(-1, -T::one()), (1, T::one())])
    }

    /// Union of the power ranges of base and coupling.
    pub fn power_range(&self) -> (i32, i32) {
        let mut lo = i32::MAX;
        let mut hi = i32::MIN;
        for p in [&self.base, &self.gamma_coupling] {
            if !p.is_zero() {
                lo = lo.min(p.min_power());
                hi = hi.max(p.max_power());
            }
        }
        (lo, hi)
    }

    pub fn at(&self, gamma: T) -> LaurentPolynomial<T> {
        self.at_complex(Complex::new(gamma, T::zero()))
    }

    /// Instance at complex γ (used while refining complex discriminant roots).
    pub fn at_complex(&self, gamma: Cplx<T>) -> LaurentPolynomial<T> {
        let (lo, hi) = self.power_range();
        if lo > hi {
            return LaurentPolynomial::zero();
        }
        let coeffs = (lo..=hi).map(|n| self.base.coeff(n) + self.gamma_coupling.coeff(n) * gamma).collect();
        LaurentPolynomial::new(lo, coeffs)
    }

    /// The Hamiltonian at the family's own γ.
    pub fn hamiltonian(&self) -> LaurentPolynomial<T> {
        self.at(self.gamma)
    }

    pub fn with_gamma(&self, gamma: T) -> Self {
        Self { gamma, ..self.clone() }
    }

    /// Sets a named parameter: `gamma` (or `γ`), or `t<n>` which sets the
    /// base coefficients at both `+n` and `-n`.
    pub fn with_parameter(&self, name: &str, value: T) -> Result<Self> {
        if name == "gamma" || name == "γ" || name == "g" {
            return Ok(self.with_gamma(value));
        }
        let n: i32 = name
            .strip_prefix('t')
            .and_then(|s| s.parse().ok())
            .filter(|&n: &i32| n > 0)
            .ok_or_else(|| Error::domain(format!("unknown sweep parameter '{name}' (use gamma or t<n>)")))?;
        let v = Complex::new(value, T::zero());
        let terms = self
            .base
            .terms()
            .filter(|&(m, _)| m != n && m != -n)
            .chain([(n, v), (-n, v)]);
        Ok(Self { base: LaurentPolynomial::from_terms(terms), ..self.clone() })
    }

    /// Multiplies every base hopping by `c`, leaving the coupling alone.
    pub fn scale_base(&self, c: T) -> Self {
        Self { base: &self.base * Complex::new(c, T::zero()), ..self.clone() }
    }

    /// Both base and coupling must be real for PT symmetry at every real γ.
    pub fn realness_certificate(&self) -> RealnessCertificate {
        let tol = T::of(NONZERO_TOL);
        let a = self.base.realness_certificate(tol);
        let b = self.gamma_coupling.realness_certificate(tol);
        RealnessCertificate {
            is_pt_symmetric: a.is_pt_symmetric && b.is_pt_symmetric,
            max_imag_coefficient: a.max_imag_coefficient.max(b.max_imag_coefficient),
        }
    }

    /// Both ends of the padded range must be populated for some γ.
    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.power_range();
        if lo > hi {
            return Err(Error::domain("model has no nonzero coefficient"));
        }
        if lo > -1 {
            return Err(Error::domain("model needs a negative power (l >= 1)"));
        }
        if hi < 1 {
            return Err(Error::domain("model needs a positive power (r >= 1)"));
        }
        Ok(())
    }

    pub fn cast<U: Real>(&self) -> ModelFamily<U> {
        ModelFamily { base: self.base.cast(), gamma_coupling: self.gamma_coupling.cast(), gamma: cast_real(self.gamma) }
    }
}

/// A coefficient in a model file: a real number or `[re, im]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coefficient {
    Real(f64),
    Complex([f64; 2]),
}

impl Coefficient {
    fn value(self) -> Complex<f64> {
        match self {
            Coefficient::Real(x) => Complex::new(x, 0.0),
            Coefficient::Complex([re, im]) => Complex::new(re, im),
        }
    }
}

/// On-disk model description. Keys of the coefficient maps are integer
/// powers written as strings; missing powers are zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub base: BTreeMap<String, Coefficient>,
    #[serde(default)]
    pub gamma_coupling: BTreeMap<String, Coefficient>,
    #[serde(default)]
    pub gamma: f64,
}

fn terms_of(map: &BTreeMap<String, Coefficient>, what: &str) -> Result<Vec<(i32, Complex<f64>)>> {
    map.iter()
        .map(|(k, v)| {
            let n: i32 = k
                .trim()
                .parse()
                .map_err(|_| Error::domain(format!("{what}: key '{k}' is not an integer power")))?;
            let c = v.value();
            if !c.re.is_finite() || !c.im.is_finite() {
                return Err(Error::domain(format!("{what}: coefficient of power {n} is not finite")));
            }
            Ok((n, c))
        })
        .collect()
}

impl ModelFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::domain(format!("malformed model file: {e}")))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::domain(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_family(&self) -> Result<ModelFamily<f64>> {
        if self.base.is_empty() {
            return Err(Error::domain("model file has an empty base"));
        }
        if !self.gamma.is_finite() {
            return Err(Error::domain("gamma is not finite"));
        }
        let base = LaurentPolynomial::from_terms(terms_of(&self.base, "base")?);
        let coupling = LaurentPolynomial::from_terms(terms_of(&self.gamma_coupling, "gamma_coupling")?);
        let fam = ModelFamily::new(base, coupling, self.gamma);
        fam.validate()?;
        Ok(fam)
    }

    pub fn from_family(fam: &ModelFamily<f64>) -> Self {
        let conv = |p: &LaurentPolynomial<f64>| {
            p.terms()
                .map(|(n, z)| {
                    let c = if z.im == 0.0 { Coefficient::Real(z.re) } else { Coefficient::Complex([z.re, z.im]) };
                    (n.to_string(), c)
                })
                .collect()
        };
        Self { base: conv(&fam.base), gamma_coupling: conv(&fam.gamma_coupling), gamma: fam.gamma }
    }
}

/// Reads and validates a model file.
pub fn load_model(path: impl AsRef<Path>) -> Result<ModelFamily<f64>> {
    ModelFile::load(path)?.to_family()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn evaluate_examples() {
        let hn = LaurentPolynomial::from_real_terms(&[(-1, 1.0), (1, 1.0)]);
        assert!((hn.evaluate(c(1.0, 0.0)).unwrap() - c(2.0, 0.0)).norm() < 1e-15);
        let fam = ModelFamily::third_neighbor(1.0, 0.2, 0.2, 0.37);
        assert!((fam.hamiltonian().evaluate(c(1.0, 0.0)).unwrap() - c(2.8, 0.0)).norm() < 1e-14);
        let h = ModelFamily::hatano_nelson(1.0, 0.5).hamiltonian();
        assert!((h.evaluate(c(0.0, 1.0)).unwrap() - c(0.0, 1.0)).norm() < 1e-15);
        assert!(h.evaluate(c(0.0, 0.0)).is_err());
    }

    #[test]
    fn derivative_examples() {
        let hn = LaurentPolynomial::from_real_terms(&[(-1, 1.0), (1, 1.0)]);
        let d = hn.derivative();
        assert_eq!(d.min_power(), -2);
        assert_eq!(d.coeff(0), c(1.0, 0.0));
        assert_eq!(d.coeff(-2), c(-1.0, 0.0));
        assert_eq!(d.coeff(-1), c(0.0, 0.0));
        assert!(LaurentPolynomial::from_real_terms(&[(0, 3.0)]).derivative().is_zero());
    }

    #[test]
    fn char_poly_layout() {
        let h = ModelFamily::third_neighbor(1.0, 0.2, 0.2, 0.05).hamiltonian();
        let e = c(0.3, 0.1);
        let p = h.char_poly(e).descending();
        let want = [0.2, 0.2, 1.05, f64::NAN, 0.95, 0.2, 0.2];
        for (k, w) in want.iter().enumerate() {
            if k == 3 {
                assert!((p[k] + e).norm() < 1e-15);
            } else {
                assert!((p[k] - c(*w, 0.0)).norm() < 1e-15, "{k}");
            }
        }
        let hn = ModelFamily::hatano_nelson(1.0, 0.6).hamiltonian();
        let p = hn.char_poly(c(0.7, 0.0)).descending();
        assert_eq!(p.len(), 3);
        assert!((p[0] - c(1.6, 0.0)).norm() < 1e-15 && (p[1] + c(0.7, 0.0)).norm() < 1e-15);
        assert!((p[2] - c(0.4, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn parameter_sweep_names() {
        let f = ModelFamily::third_neighbor(1.0, 0.2, 0.2, 0.0);
        let g = f.with_parameter("t3", -0.1).unwrap();
        assert_eq!(g.base.coeff(3), c(-0.1, 0.0));
        assert_eq!(g.base.coeff(-3), c(-0.1, 0.0));
        assert_eq!(f.with_parameter("gamma", 0.3).unwrap().gamma, 0.3);
        assert!(f.with_parameter("x", 1.0).is_err());
    }

    #[test]
    fn model_file_parsing() {
        let txt = r#"{"base": {"-3": 0.2, "-2": 0.2, "-1": 1.0, "1": 1.0, "2": 0.2, "3": 0.2},
                      "gamma_coupling": {"-1": -1.0, "1": 1.0}, "gamma": 0.02}"#;
        let fam = ModelFile::from_json(txt).unwrap().to_family().unwrap();
        let h = fam.hamiltonian();
        assert_eq!((h.l().unwrap(), h.r().unwrap()), (3, 3));
        assert!((h.coeff(1) - c(1.02, 0.0)).norm() < 1e-15);
        assert!(ModelFile::from_json(r#"{"base": {"1": 1.0}, "extra": 1}"#).is_err());
        assert!(ModelFile::from_json(r#"{"base": {"1": 1.0, "2": 0.5}}"#).unwrap().to_family().is_err());
        assert!(ModelFile::from_json(r#"{"base": {}}"#).unwrap().to_family().is_err());
        assert!(ModelFile::from_json(r#"{"base": {"1": "x"}}"#).is_err());
        let cplx = ModelFile::from_json(r#"{"base": {"-1": [1.0, 0.5], "1": 1.0}}"#).unwrap().to_family().unwrap();
        assert!(!cplx.realness_certificate().is_pt_symmetric);
    }
}
