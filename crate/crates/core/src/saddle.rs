//! Saddle points `H'(β_s) = 0`, their order and energy coalescences.

use num_complex::Complex;
use crate::error::{Error, Result};
use crate::model::{LaurentPolynomial, ModelFamily};
use crate::rootfind::{middle_pair, roots, MEMBERSHIP_TOL};
use crate::scalar::{cabs, Cplx, Real};

/// Relative tolerance on `|∂^j H|` when classifying the saddle order.
pub const ORDER_TOL: f64 = 1e-7;
/// Saddles closer to 0 or infinity than this are non-Bloch EP limits.
pub const EP_LIMIT: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct SaddlePoint<T: Real> {
    pub beta_s: Cplx<T>,
    pub energy_s: Cplx<T>,
    /// Smallest `k >= 2` with `∂^k H(β_s) ≠ 0`.
    pub order_k: usize,
    /// Whether `β_s` is one of the two middle roots at `E_s` and the
    /// middle pair has equal modulus there.
    pub on_gbz: bool,
    pub modulus_gap: T,
    /// Label shared by numerically coincident saddles.
    pub cluster_id: usize,
    pub multiplicity: usize,
    pub ep_limit: bool,
}

/// All `l + r` saddle points sorted by energy (real part, then imaginary part).
pub fn saddle_points<T: Real>(h: &LaurentPolynomial<T>) -> Result<Vec<SaddlePoint<T>>> {
    saddle_points_tol(h, T::of(MEMBERSHIP_TOL))
}

pub fn saddle_points_tol<T: Real>(h: &LaurentPolynomial<T>, membership_tol: T) -> Result<Vec<SaddlePoint<T>>> {
    h.validate()?;
    let rs = roots(&h.saddle_poly())?;
    let tol = T::of(ORDER_TOL) * h.curvature_scale();
    let ncl = rs.cluster.iter().copied().max().map_or(0, |m| m + 1);
    let mut centroid = vec![(Cplx::<T>::new(T::zero(), T::zero()), 0usize); ncl];
    for (z, &c) in rs.roots.iter().zip(&rs.cluster) {
        centroid[c].0 += *z;
        centroid[c].1 += 1;
    }
    let mut out = Vec::with_capacity(rs.len());
    for (i, &beta) in rs.roots.iter().enumerate() {
        if !(beta.re.is_finite() && beta.im.is_finite()) {
            return Err(Error::numerical("non-finite saddle point"));
        }
        let cid = rs.cluster[i];
        let (sum, m) = centroid[cid];
        let center = sum / T::from_usize_lossy(m);
        let ep_limit = cabs(beta) < T::of(EP_LIMIT) || cabs(beta) > T::of(1.0 / EP_LIMIT);
        let energy = h.value(beta);
        let k = classify_order_tol(h, center, tol)?.max(m + 1);
        let (on_gbz, gap) = if ep_limit {
            (false, T::infinity())
        } else {
            let mp = middle_pair(h, energy)?;
            (mp.in_spectrum(membership_tol) && mp.contains(beta), mp.gap)
        };
        out.push(SaddlePoint {
            beta_s: beta,
            energy_s: energy,
            order_k: k,
            on_gbz,
            modulus_gap: gap,
            cluster_id: cid,
            multiplicity: m,
            ep_limit,
        });
    }
    out.sort_by(|a, b| {
        a.energy_s
            .re
            .partial_cmp(&b.energy_s.re)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.energy_s.im.partial_cmp(&b.energy_s.im).unwrap_or(std::cmp::Ordering::Equal))
    });
    Ok(out)
}

/// Order of the saddle at `beta`, with the default tolerance.
pub fn classify_order<T: Real>(h: &LaurentPolynomial<T>, beta: Cplx<T>) -> Result<usize> {
    classify_order_tol(h, beta, T::of(ORDER_TOL) * h.curvature_scale())
}

/// Smallest `k >= 2` with `|∂^k H(β)| > tol`; `∂H(β)` itself must be below `tol`.
pub fn classify_order_tol<T: Real>(h: &LaurentPolynomial<T>, beta: Cplx<T>, tol: T) -> Result<usize> {
    if cabs(h.derivative_value(beta, 1)) > tol {
        return Err(Error::domain("not a saddle point: H'(β) is not zero"));
    }
    let kmax = (h.max_power() - h.min_power()) as usize + 1;
    for k in 2..=kmax + 1 {
        if cabs(h.derivative_value(beta, k)) > tol {
            return Ok(k);
        }
    }
    Err(Error::numerical("all derivatives vanish at the saddle"))
}

/// Two saddles whose energies agree.
#[derive(Clone, Debug, PartialEq)]
pub struct Coalescence {
    pub i: usize,
    pub j: usize,
    pub energy_distance: f64,
    /// Same `β_s` up to clustering: a higher-order saddle rather than two
    /// distinct saddles sharing an energy.
    pub shares_beta: bool,
}

/// Index pairs `i < j` with `|E_i − E_j| < energy_tol · scale`, where scale
/// is the largest saddle energy modulus (at least 1).
pub fn coalescence_pairs<T: Real>(saddles: &[SaddlePoint<T>], energy_tol: T) -> Vec<Coalescence> {
    let scale = saddles.iter().fold(T::one(), |m, s| m.max(cabs(s.energy_s)));
    let mut out = Vec::new();
    for i in 0..saddles.len() {
        for j in i + 1..saddles.len() {
            let d = cabs(saddles[i].energy_s - saddles[j].energy_s);
            if d < energy_tol * scale {
                out.push(Coalescence {
                    i,
                    j,
                    energy_distance: d.as_f64(),
                    shares_beta: saddles[i].cluster_id == saddles[j].cluster_id,
                });
            }
        }
    }
    out
}

/// Finite-difference `d/dγ max Im E_s` over on-GBZ saddles against `Im B(β*)`
/// at the maximizing saddle.
#[derive(Clone, Debug, PartialEq)]
pub struct ImagDerivativeCheck {
    pub gamma: f64,
    pub max_imag: f64,
    pub beta_star: Complex<f64>,
    pub finite_difference: f64,
    pub formula: f64,
}

impl ImagDerivativeCheck {
    pub fn relative_error(&self) -> f64 {
        (self.finite_difference - self.formula).abs() / self.formula.abs().max(f64::MIN_POSITIVE)
    }
}

fn max_imag_saddle<T: Real>(h: &LaurentPolynomial<T>) -> Result<Option<SaddlePoint<T>>> {
    Ok(saddle_points(h)?
        .into_iter()
        .filter(|s| s.on_gbz && !s.ep_limit)
        .max_by(|a, b| a.energy_s.im.partial_cmp(&b.energy_s.im).unwrap_or(std::cmp::Ordering::Equal)))
}

/// Checks `d/dγ max Im E(γ) = Im B(β*)` by a central difference of step
/// `delta`. Errors unless the family is in its PT-broken phase at `gamma`.
pub fn max_imag_derivative_check<T: Real>(family: &ModelFamily<T>, gamma: T, delta: T) -> Result<ImagDerivativeCheck> {
    if !(delta > T::zero()) {
        return Err(Error::domain("finite-difference step must be positive"));
    }
    let h = family.at(gamma);
    let star = max_imag_saddle(&h)?.ok_or_else(|| Error::domain("no on-GBZ saddle at this γ"))?;
    let scale = h.abs_sum();
    if !(star.energy_s.im > T::of(1e-8) * scale) {
        return Err(Error::domain("family is not in the PT-broken phase at this γ"));
    }
    let side = |g: T| -> Result<T> {
        let s = max_imag_saddle(&family.at(g))?.ok_or_else(|| Error::numerical("on-GBZ saddle lost during differencing"))?;
        Ok(s.energy_s.im)
    };
    let fd = (side(gamma + delta)? - side(gamma - delta)?) / (delta + delta);
    let formula = family.gamma_coupling.value(star.beta_s).im;
    Ok(ImagDerivativeCheck {
        gamma: gamma.as_f64(),
        max_imag: star.energy_s.im.as_f64(),
        beta_star: Complex::new(star.beta_s.re.as_f64(), star.beta_s.im.as_f64()),
        finite_difference: fd.as_f64(),
        formula: formula.as_f64(),
    })
}
