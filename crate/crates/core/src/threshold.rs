//! PT-breaking threshold: real roots of `D(γ)` whose degenerate saddle
//! energy lies on the non-Bloch spectrum.

use num_complex::Complex;
use num_traits::Zero;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{solve, Dense};
use crate::model::{LaurentPolynomial, ModelFamily};
use crate::resultant::{discriminant_at, discriminant_gamma, energy_radius, GammaDiscriminant};
use crate::rootfind::{middle_pair, roots, MEMBERSHIP_TOL};
use crate::saddle::{saddle_points, SaddlePoint};
use crate::scalar::{cabs, Cplx, Real};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThresholdOptions {
    pub membership_tol: f64,
    /// Relative bound on `|Im γ|` for a refined root to count as real.
    pub gamma_imag_tol: f64,
    /// Relative bound on `|Im E_s|` (against `Σ|h_n|`).
    pub energy_imag_tol: f64,
    /// Discriminant roots with `|γ|` up to this factor times the window
    /// maximum are refined.
    pub seed_radius: f64,
}

impl Default for ThresholdOptions {
    fn default() -> Self {
        Self { membership_tol: MEMBERSHIP_TOL, gamma_imag_tol: 1e-8, energy_imag_tol: 1e-6, seed_radius: 1.5 }
    }
}

/// How a candidate was refined.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Refinement {
    /// Newton on `(β_i, β_j, γ)` for two distinct saddles with equal energy.
    Pair,
    /// Newton on `(β, γ)` for a saddle of order three.
    Merged,
    /// Secant iteration on `D(γ)` itself.
    Polished,
    /// The root of `D` at `γ = 0`.
    Origin,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GammaCandidate<T: Real> {
    pub gamma: T,
    pub degenerate_energy: Cplx<T>,
    pub betas: (Cplx<T>, Cplx<T>),
    /// Middle-pair modulus gap at `Re E_s`.
    pub membership_gap: T,
    /// One of the coalescing saddles is itself a middle root at its energy.
    pub beta_in_middle: bool,
    pub real_energy: bool,
    pub refinement: Refinement,
    /// An end hopping vanishes at this γ; membership was taken in the limit
    /// from below.
    pub ep_limit: bool,
    pub accepted: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ThresholdResult<T: Real> {
    /// Real candidates inside the window, ascending in γ.
    pub candidates: Vec<GammaCandidate<T>>,
    /// Smallest accepted γ.
    pub gamma_c: Option<T>,
    pub diagnostic: Option<String>,
    pub discriminant_degree: usize,
}

impl<T: Real> ThresholdResult<T> {
    pub fn critical(&self) -> Option<&GammaCandidate<T>> {
        let g = self.gamma_c?;
        self.candidates.iter().find(|c| c.accepted && c.gamma == g)
    }
}

/// Threshold with default tolerances.
pub fn pt_threshold<T: Real>(family: &ModelFamily<T>, window: (T, T)) -> Result<ThresholdResult<T>> {
    pt_threshold_with(family, window, &ThresholdOptions::default())
}

pub fn pt_threshold_with<T: Real>(
    family: &ModelFamily<T>,
    window: (T, T),
    opts: &ThresholdOptions,
) -> Result<ThresholdResult<T>> {
    family.validate()?;
    if !family.realness_certificate().is_pt_symmetric {
        return Err(Error::domain("family is not PT-symmetric: K H K = H at every real γ needs real base and coupling hoppings"));
    }
    let (lo, hi) = window;
    if !(lo.is_finite() && hi.is_finite() && lo >= T::zero() && lo < hi) {
        return Err(Error::domain("γ window must satisfy 0 <= γ_min < γ_max"));
    }
    let disc = discriminant_gamma(family, window)?;
    if disc.degenerate {
        return Ok(ThresholdResult {
            candidates: Vec::new(),
            gamma_c: None,
            diagnostic: Some("no transition in window: saddle energies do not depend on γ".into()),
            discriminant_degree: 0,
        });
    }
    let found = candidates(family, &disc, window, opts)?;
    let gamma_c = found.iter().filter(|c| c.accepted).map(|c| c.gamma).fold(None, |m: Option<T>, g| {
        Some(m.map_or(g, |m| m.min(g)))
    });
    let diagnostic = if found.is_empty() {
        Some("no coalescence in window".to_string())
    } else if gamma_c.is_none() {
        Some("all coalescences off-GBZ".to_string())
    } else {
        None
    };
    Ok(ThresholdResult { candidates: found, gamma_c, diagnostic, discriminant_degree: disc.degree() })
}

fn candidates<T: Real>(
    family: &ModelFamily<T>,
    disc: &GammaDiscriminant<T>,
    (lo, hi): (T, T),
    opts: &ThresholdOptions,
) -> Result<Vec<GammaCandidate<T>>> {
    let reach = T::of(opts.seed_radius) * lo.abs().max(hi.abs());
    let seeds: Vec<Cplx<T>> = disc.roots.iter().copied().filter(|z| cabs(*z) < reach).collect();
    let refined: Vec<Result<Option<(T, Refinement, Option<(Cplx<T>, Cplx<T>)>)>>> =
        seeds.par_iter().map(|&z| refine(family, disc, z, opts)).collect();
    let slack = T::of(1e-12) * T::one().max(hi.abs());
    let mut out: Vec<GammaCandidate<T>> = Vec::new();
    for r in refined {
        let Some((g, how, betas)) = r? else { continue };
        if g < lo - slack || g > hi + slack {
            continue;
        }
        // Roots at γ = 0 are handled by the origin candidate below.
        if g.abs() < slack && disc.zero_multiplicity > 0 {
            continue;
        }
        let g = if g.abs() < slack { T::zero() } else { g.max(lo).min(hi) };
        if out.iter().any(|c| (c.gamma - g).abs() < T::of(1e-8) * T::one().max(g.abs())) {
            continue;
        }
        out.push(assess(family, g, how, betas, opts)?);
    }
    if disc.zero_multiplicity > 0 && lo <= T::zero() && hi >= T::zero() && !out.iter().any(|c| c.gamma.is_zero()) {
        out.push(assess(family, T::zero(), Refinement::Origin, None, opts)?);
    }
    out.sort_by(|a, b| a.gamma.partial_cmp(&b.gamma).unwrap_or(std::cmp::Ordering::Equal));
    Ok(out)
}

/// Refines one discriminant root. Returns `None` when it is not real.
fn refine<T: Real>(
    family: &ModelFamily<T>,
    disc: &GammaDiscriminant<T>,
    z: Cplx<T>,
    opts: &ThresholdOptions,
) -> Result<Option<(T, Refinement, Option<(Cplx<T>, Cplx<T>)>)>> {
    let mut result = None;
    if let Some((bi, bj)) = closest_energy_pair(&family.at_complex(z)) {
        if let Some((a, b, g)) = newton_pair(family, bi, bj, z) {
            if cabs(a - b) > T::of(1e-4) * cabs(a) {
                result = Some((g, Refinement::Pair, Some((a, b))));
            }
        }
        if result.is_none() {
            let mid = (bi + bj) * T::of(0.5);
            if let Some((b, g)) = newton_merged(family, mid, z) {
                result = Some((g, Refinement::Merged, Some((b, b))));
            }
        }
    }
    let (g, how, betas) = match result {
        Some(r) => r,
        None => (polish(family, disc, z), Refinement::Polished, None),
    };
    if g.im.abs() > T::of(opts.gamma_imag_tol) * T::one().max(cabs(g)) {
        return Ok(None);
    }
    Ok(Some((g.re, how, betas)))
}

/// Saddles of a (possibly complex-γ) instance with the closest energies.
fn closest_energy_pair<T: Real>(h: &LaurentPolynomial<T>) -> Option<(Cplx<T>, Cplx<T>)> {
    if h.validate().is_err() {
        return None;
    }
    let rs = roots(&h.saddle_poly()).ok()?;
    let e: Vec<Cplx<T>> = rs.roots.iter().map(|&b| h.value(b)).collect();
    let mut best: Option<(T, usize, usize)> = None;
    for i in 0..e.len() {
        for j in i + 1..e.len() {
            let d = cabs(e[i] - e[j]);
            if best.is_none_or(|b| d < b.0) {
                best = Some((d, i, j));
            }
        }
    }
    best.map(|(_, i, j)| (rs.roots[i], rs.roots[j]))
}

fn converged<T: Real>(dx: &[Cplx<T>], x: &[Cplx<T>]) -> bool {
    let step = dx.iter().fold(T::zero(), |m, &z| m.max(cabs(z)));
    let size = x.iter().fold(T::one(), |m, &z| m.max(cabs(z)));
    step <= T::epsilon() * T::of(64.0) * size
}

fn finite<T: Real>(x: &[Cplx<T>]) -> bool {
    x.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

const NEWTON_MAX: usize = 60;

/// Solves `H'(β_i) = H'(β_j) = 0`, `H(β_i) = H(β_j)` for `(β_i, β_j, γ)`.
fn newton_pair<T: Real>(family: &ModelFamily<T>, bi: Cplx<T>, bj: Cplx<T>, g: Cplx<T>) -> Option<(Cplx<T>, Cplx<T>, Cplx<T>)> {
    let b = &family.gamma_coupling;
    let mut x = [bi, bj, g];
    for it in 0..NEWTON_MAX {
        let h = family.at_complex(x[2]);
        let f = [
            h.derivative_value(x[0], 1),
            h.derivative_value(x[1], 1),
            h.value(x[0]) - h.value(x[1]),
        ];
        let z = Complex::zero();
        let j = Dense::from_fn(3, |r, c| match (r, c) {
            (0, 0) => h.derivative_value(x[0], 2),
            (0, 2) => b.derivative_value(x[0], 1),
            (1, 1) => h.derivative_value(x[1], 2),
            (1, 2) => b.derivative_value(x[1], 1),
            (2, 0) => f[0],
            (2, 1) => -f[1],
            (2, 2) => b.value(x[0]) - b.value(x[1]),
            _ => z,
        });
        let dx = solve(j, &[-f[0], -f[1], -f[2]]).ok()?;
        for k in 0..3 {
            x[k] += dx[k];
        }
        if !finite(&x) {
            return None;
        }
        if converged(&dx, &x) || (it > 0 && f.iter().all(|v| v.is_zero())) {
            return Some((x[0], x[1], x[2]));
        }
    }
    None
}

/// Solves `H'(β) = H''(β) = 0` for `(β, γ)`.
fn newton_merged<T: Real>(family: &ModelFamily<T>, beta: Cplx<T>, g: Cplx<T>) -> Option<(Cplx<T>, Cplx<T>)> {
    let b = &family.gamma_coupling;
    let mut x = [beta, g];
    for _ in 0..NEWTON_MAX {
        let h = family.at_complex(x[1]);
        let f = [h.derivative_value(x[0], 1), h.derivative_value(x[0], 2)];
        let j = Dense::from_fn(2, |r, c| match (r, c) {
            (0, 0) => f[1],
            (0, 1) => b.derivative_value(x[0], 1),
            (1, 0) => h.derivative_value(x[0], 3),
            _ => b.derivative_value(x[0], 2),
        });
        let dx = solve(j, &[-f[0], -f[1]]).ok()?;
        x[0] += dx[0];
        x[1] += dx[1];
        if !finite(&x) {
            return None;
        }
        if converged(&dx, &x) {
            return Some((x[0], x[1]));
        }
    }
    None
}

/// Secant iteration on the directly evaluated discriminant; falls back to
/// the interpolated root.
fn polish<T: Real>(family: &ModelFamily<T>, disc: &GammaDiscriminant<T>, z: Cplx<T>) -> Cplx<T> {
    let re = energy_radius(family, disc.radius);
    let d = |g: Cplx<T>| discriminant_at(family, g, re).ok();
    let mut x0 = z;
    let mut x1 = z + Complex::new(T::of(1e-7) * T::one().max(cabs(z)), T::zero());
    let (Some(mut f0), Some(mut f1)) = (d(x0), d(x1)) else { return z };
    for _ in 0..NEWTON_MAX {
        let den = f1 - f0;
        if den.is_zero() {
            break;
        }
        let x2 = x1 - f1 * (x1 - x0) / den;
        if !finite(&[x2]) || cabs(x2 - z) > T::of(1e-2) * T::one().max(cabs(z)) {
            return z;
        }
        let step = cabs(x2 - x1);
        x0 = x1;
        f0 = f1;
        x1 = x2;
        f1 = match d(x1) {
            Some(v) => v,
            None => return x1,
        };
        if step <= T::epsilon() * T::of(64.0) * T::one().max(cabs(x1)) || f1.is_zero() {
            break;
        }
    }
    x1
}

/// Membership test for a real candidate γ.
fn assess<T: Real>(
    family: &ModelFamily<T>,
    gamma: T,
    how: Refinement,
    betas: Option<(Cplx<T>, Cplx<T>)>,
    opts: &ThresholdOptions,
) -> Result<GammaCandidate<T>> {
    let (lo, hi) = family.power_range();
    let exact = family.at(gamma);
    let ep_limit = exact.validate().is_err() || exact.min_power() != lo || exact.max_power() != hi;
    // At a vanishing end hopping the model loses a root; look from just below.
    let g_eval = if ep_limit { gamma - T::of(1e-9) * T::one().max(gamma.abs()) } else { gamma };
    let h = family.at(g_eval);
    let saddles = saddle_points(&h)?;
    let (i, j) = pick_pair(&saddles, if ep_limit { None } else { betas }, how == Refinement::Origin);
    let (si, sj) = (&saddles[i], &saddles[j]);
    let energy = (si.energy_s + sj.energy_s) * T::of(0.5);
    let mp = middle_pair(&h, Complex::new(energy.re, T::zero()))?;
    let scale = h.abs_sum();
    let real_energy = energy.im.abs() < T::of(opts.energy_imag_tol) * scale;
    let membership_gap = mp.gap;
    let beta_in_middle = si.on_gbz || sj.on_gbz;
    let accepted = real_energy && membership_gap < T::of(opts.membership_tol) && beta_in_middle;
    Ok(GammaCandidate {
        gamma,
        degenerate_energy: energy,
        betas: (si.beta_s, sj.beta_s),
        membership_gap,
        beta_in_middle,
        real_energy,
        refinement: how,
        ep_limit,
        accepted,
    })
}

/// The two saddles matching the refined `β`s, or the pair with the closest
/// energies. At `γ = 0` pairs of one multiple saddle are skipped and pairs
/// on the GBZ preferred.
fn pick_pair<T: Real>(saddles: &[SaddlePoint<T>], betas: Option<(Cplx<T>, Cplx<T>)>, origin: bool) -> (usize, usize) {
    let nearest = |b: Cplx<T>, skip: Option<usize>| {
        (0..saddles.len())
            .filter(|&k| Some(k) != skip)
            .min_by(|&x, &y| {
                cabs(saddles[x].beta_s - b)
                    .partial_cmp(&cabs(saddles[y].beta_s - b))
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .unwrap_or(0)
    };
    if let Some((a, b)) = betas {
        let i = nearest(a, None);
        return (i, nearest(b, Some(i)));
    }
    let mut best: Option<((bool, T), usize, usize)> = None;
    for i in 0..saddles.len() {
        for j in i + 1..saddles.len() {
            let (si, sj) = (&saddles[i], &saddles[j]);
            if origin && si.cluster_id == sj.cluster_id {
                continue;
            }
            let key = (!(origin && si.on_gbz && sj.on_gbz), cabs(si.energy_s - sj.energy_s));
            let tight = T::of(1e-6) * T::one().max(cabs(si.energy_s));
            // At the origin only exact coincidences count; among them prefer GBZ pairs.
            let key = if origin && key.1 > tight { (true, key.1 + T::one()) } else { key };
            if best.as_ref().is_none_or(|b| (!key.0 && b.0 .0) || (key.0 == b.0 .0 && key.1 < b.0 .1)) {
                best = Some((key, i, j));
            }
        }
    }
    best.map_or((0, 0), |b| (b.1, b.2))
}

/// One point of a phase boundary scan.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryPoint {
    pub value: f64,
    pub gamma_c: Option<f64>,
    pub degenerate_energy: Option<Complex<f64>>,
    pub candidates: usize,
    pub accepted: usize,
    pub diagnostic: Option<String>,
}

/// `γ_c` as a function of one named parameter.
pub fn phase_boundary(
    family: &ModelFamily<f64>,
    param: &str,
    values: &[f64],
    window: (f64, f64),
    opts: &ThresholdOptions,
) -> Result<Vec<BoundaryPoint>> {
    values
        .par_iter()
        .map(|&v| {
            let fam = family.with_parameter(param, v)?;
            let res = pt_threshold_with(&fam, window, opts)?;
            Ok(BoundaryPoint {
                value: v,
                gamma_c: res.gamma_c,
                degenerate_energy: res.critical().map(|c| c.degenerate_energy),
                candidates: res.candidates.len(),
                accepted: res.candidates.iter().filter(|c| c.accepted).count(),
                diagnostic: res.diagnostic,
            })
        })
        .collect()
}
