//! Open-boundary density of states from the GBZ, histograms of computed
//! spectra and van Hove exponent fits.

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::LaurentPolynomial;
use crate::rootfind::{middle_pair, MEMBERSHIP_TOL};
use crate::saddle::saddle_points;
use crate::scalar::{cabs, Real};
use crate::spectra::SpectrumResult;

/// Energies this close (relative to `Σ|h_n|`) to an on-GBZ saddle are singular.
pub const SINGULAR_TOL: f64 = 1e-9;
/// Half-width of the quadrature exclusion window, relative to the bandwidth.
pub const EXCLUSION: f64 = 1e-3;
/// Default exponent-fit window relative to the bandwidth.
pub const FIT_WINDOW: (f64, f64) = (1e-4, 1e-2);
const FIT_POINTS: usize = 30;
const FIT_MIN_VALID: usize = 10;
const QUAD_NODES: usize = 4000;

/// `ρ(E)` with its band flag.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DosValue {
    pub rho: f64,
    /// `E` lies on the open-boundary spectrum.
    pub in_band: bool,
    /// More than two roots tie in modulus at `E`; all of them were summed.
    pub higher_crossing: bool,
}

/// `ρ(E) = (1/2π) Σ |Im[1/(β ∂_β H(β))]|` over the middle tie group of
/// `H(β) = E`. Outside the band `ρ = 0` and `in_band` is false.
pub fn dos_at<T: Real>(h: &LaurentPolynomial<T>, e: T) -> Result<DosValue> {
    let scale = h.abs_sum();
    for s in saddle_points(h)? {
        if s.on_gbz && cabs(s.energy_s - Complex::new(e, T::zero())) < T::of(SINGULAR_TOL) * scale {
            return Err(Error::domain(format!("E = {e} is a saddle energy; the density of states diverges there")));
        }
    }
    dos_unchecked(h, e)
}

fn dos_unchecked<T: Real>(h: &LaurentPolynomial<T>, e: T) -> Result<DosValue> {
    let mp = middle_pair(h, Complex::new(e, T::zero()))?;
    if !mp.in_spectrum(T::of(MEMBERSHIP_TOL)) {
        return Ok(DosValue { rho: 0.0, in_band: false, higher_crossing: false });
    }
    let dh = h.derivative();
    let mut sum = T::zero();
    for &b in &mp.middle_group {
        let w = b * dh.value(b);
        let inv = Complex::new(T::one(), T::zero()) / w;
        if !(inv.im.is_finite()) {
            return Err(Error::domain("density of states diverges at this energy"));
        }
        sum += inv.im.abs();
    }
    Ok(DosValue { rho: (sum / T::TAU()).as_f64(), in_band: true, higher_crossing: mp.tie_size() > 2 })
}

#[derive(Clone, Debug, PartialEq)]
pub struct DosCurve {
    pub energies: Vec<f64>,
    /// States per unit energy per site.
    pub rho: Vec<f64>,
    /// Windows around saddle energies treated analytically.
    pub excluded_windows: Vec<(f64, f64)>,
}

/// Evaluates `ρ` on `n` equally spaced energies; energies that hit a
/// saddle exactly are dropped.
pub fn dos_curve(h: &LaurentPolynomial<f64>, emin: f64, emax: f64, n: usize) -> Result<DosCurve> {
    if n < 2 || !(emin < emax) {
        return Err(Error::domain("energy grid needs emin < emax and at least 2 samples"));
    }
    let band = band_edges(h).ok();
    let sing = singular_energies(h)?;
    let energies: Vec<f64> = (0..n).map(|k| emin + (emax - emin) * k as f64 / (n - 1) as f64).collect();
    let vals: Vec<Result<Option<f64>>> = energies
        .par_iter()
        .map(|&e| match dos_at(h, e) {
            Ok(v) => Ok(Some(v.rho)),
            Err(err) if err.is_domain() => Ok(None),
            Err(err) => Err(err),
        })
        .collect();
    let mut out = DosCurve { energies: Vec::with_capacity(n), rho: Vec::with_capacity(n), excluded_windows: Vec::new() };
    for (e, v) in energies.into_iter().zip(vals) {
        if let Some(r) = v? {
            out.energies.push(e);
            out.rho.push(r);
        }
    }
    if let Some((lo, hi)) = band {
        let w = EXCLUSION * (hi - lo);
        out.excluded_windows = sing.iter().map(|&s| (s - w, s + w)).collect();
    }
    Ok(out)
}

/// Real energies of on-GBZ saddles, ascending and deduplicated.
pub fn singular_energies(h: &LaurentPolynomial<f64>) -> Result<Vec<f64>> {
    let scale = h.abs_sum();
    let mut v: Vec<f64> = saddle_points(h)?
        .into_iter()
        .filter(|s| s.on_gbz && !s.ep_limit && s.energy_s.im.abs() < 1e-8 * scale)
        .map(|s| s.energy_s.re)
        .collect();
    v.sort_by(|a, b| a.total_cmp(b));
    v.dedup_by(|a, b| (*a - *b).abs() < 1e-7 * scale);
    Ok(v)
}

/// Extreme real on-GBZ saddle energies.
pub fn band_edges(h: &LaurentPolynomial<f64>) -> Result<(f64, f64)> {
    let s = singular_energies(h)?;
    match (s.first(), s.last()) {
        (Some(&a), Some(&b)) if b > a => Ok((a, b)),
        _ => Err(Error::domain("no real band: fewer than two real on-GBZ saddle energies")),
    }
}

/// `∫ ρ dE` over the band. Each saddle window of half-width
/// `1e-3 × bandwidth` is replaced by the integral of a power law fitted to
/// two samples just outside it; the rest uses a cosine-graded trapezoid.
pub fn band_integral(h: &LaurentPolynomial<f64>) -> Result<f64> {
    let (lo, hi) = band_edges(h)?;
    let w = EXCLUSION * (hi - lo);
    let sing = singular_energies(h)?;
    let mut total = 0.0;
    for pair in sing.windows(2) {
        let (a, b) = (pair[0] + w, pair[1] - w);
        if b > a {
            total += graded_integral(h, a, b)?;
        }
    }
    for &s in &sing {
        for side in [-1.0, 1.0] {
            let edge = s + side * w;
            if edge < lo || edge > hi {
                continue;
            }
            total += patch(h, s, side, w)?;
        }
    }
    Ok(total)
}

/// `∫ ρ` over `[a, b]` with `E = (a+b)/2 − (b−a)/2·cos θ`.
fn graded_integral(h: &LaurentPolynomial<f64>, a: f64, b: f64) -> Result<f64> {
    let (mid, half) = ((a + b) / 2.0, (b - a) / 2.0);
    let dth = std::f64::consts::PI / QUAD_NODES as f64;
    let vals: Vec<Result<f64>> = (0..=QUAD_NODES)
        .into_par_iter()
        .map(|k| {
            let th = k as f64 * dth;
            let jac = half * th.sin();
            if jac == 0.0 {
                return Ok(0.0);
            }
            Ok(dos_unchecked(h, mid - half * th.cos())?.rho * jac)
        })
        .collect();
    let mut s = 0.0;
    for (k, v) in vals.into_iter().enumerate() {
        let wgt = if k == 0 || k == QUAD_NODES { 0.5 } else { 1.0 };
        s += wgt * v?;
    }
    Ok(s * dth)
}

/// Power law `A δ^{−α}` through the samples at `δ = w` and `2w`, integrated
/// over `(0, w]`.
fn patch(h: &LaurentPolynomial<f64>, s: f64, side: f64, w: f64) -> Result<f64> {
    let r1 = dos_unchecked(h, s + side * w)?.rho;
    let r2 = dos_unchecked(h, s + side * 2.0 * w)?.rho;
    if !(r1 > 0.0 && r2 > 0.0) {
        return Ok(0.0);
    }
    let alpha = (r1 / r2).ln() / 2f64.ln();
    if alpha >= 1.0 {
        return Err(Error::numerical("non-integrable power law in a saddle window"));
    }
    Ok(r1 * w / (1.0 - alpha))
}

/// Normalized histogram of a real spectrum over `[min E, max E]`.
pub fn dos_histogram<T: Real>(sr: &SpectrumResult<T>, bins: usize) -> Result<DosCurve> {
    if bins == 0 {
        return Err(Error::domain("histogram needs at least one bin"));
    }
    if sr.eigenvalues.is_empty() {
        return Err(Error::domain("empty spectrum"));
    }
    if sr.complex_fraction > 0.0 {
        return Err(Error::domain("spectrum is complex; the density of states is defined only in the PT-exact phase"));
    }
    let e: Vec<f64> = sr.eigenvalues.iter().map(|z| z.re.as_f64()).collect();
    let lo = e.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = e.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    // A single distinct energy gets a unit-width bin.
    let (lo, width) = if hi > lo { (lo, (hi - lo) / bins as f64) } else { (lo - 0.5, 1.0 / bins as f64) };
    let mut counts = vec![0usize; bins];
    for x in e {
        let k = (((x - lo) / width) as usize).min(bins - 1);
        counts[k] += 1;
    }
    let n = sr.eigenvalues.len() as f64;
    Ok(DosCurve {
        energies: (0..bins).map(|k| lo + (k as f64 + 0.5) * width).collect(),
        rho: counts.iter().map(|&c| c as f64 / (n * width)).collect(),
        excluded_windows: Vec::new(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VanHoveFit {
    pub alpha: f64,
    pub r_squared: f64,
    /// `+1` above the saddle energy, `−1` below.
    pub side: f64,
    pub samples: usize,
}

impl VanHoveFit {
    /// Saddle order implied by `α = 1 − 1/k`.
    pub fn k_predicted(&self) -> usize {
        (1.0 / (1.0 - self.alpha)).round().max(2.0) as usize
    }
}

/// Fits `log ρ = c − α log|E − E_s|` on 30 geometric offsets in `window`,
/// on whichever side of `E_s` has more in-band samples.
pub fn vanhove_exponent(h: &LaurentPolynomial<f64>, e_s: f64, window: (f64, f64)) -> Result<VanHoveFit> {
    let (a, b) = window;
    if !(a > 0.0 && b > a) {
        return Err(Error::domain("exponent window needs 0 < δ_min < δ_max"));
    }
    let deltas: Vec<f64> = (0..FIT_POINTS)
        .map(|k| a * (b / a).powf(k as f64 / (FIT_POINTS - 1) as f64))
        .collect();
    let sample = |side: f64| -> Result<Vec<(f64, f64)>> {
        let mut v = Vec::new();
        for &d in &deltas {
            let r = dos_unchecked(h, e_s + side * d)?;
            if r.in_band && r.rho > 0.0 && r.rho.is_finite() {
                v.push((d.ln(), r.rho.ln()));
            }
        }
        Ok(v)
    };
    let up = sample(1.0)?;
    let down = sample(-1.0)?;
    let (pts, side) = if up.len() >= down.len() { (up, 1.0) } else { (down, -1.0) };
    if pts.len() < FIT_MIN_VALID {
        return Err(Error::domain(format!("only {} valid DOS samples near E_s; need {FIT_MIN_VALID}", pts.len())));
    }
    let (slope, r2) = linear_fit(&pts);
    Ok(VanHoveFit { alpha: -slope, r_squared: r2, side, samples: pts.len() })
}

/// Default window `[1e-4, 1e-2] × bandwidth`.
pub fn default_fit_window(h: &LaurentPolynomial<f64>) -> Result<(f64, f64)> {
    let (lo, hi) = band_edges(h)?;
    Ok((FIT_WINDOW.0 * (hi - lo), FIT_WINDOW.1 * (hi - lo)))
}

fn linear_fit(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = if syy > 0.0 { (sxy * sxy) / (sxx * syy) } else { 1.0 };
    (slope, r2)
}
