//! Auxiliary and generalized Brillouin zones, and cusp detection.

use num_complex::Complex;
use num_traits::Zero;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::assignment;
use crate::model::LaurentPolynomial;
use crate::rootfind::{middle_pair, roots, Polynomial, MEMBERSHIP_TOL};
use crate::scalar::{arg_2pi, cabs, Cplx, Real};
use crate::spectra::{obc_eigenvalues, Precision, ScaleMode};

/// Default number of sweep angles.
pub const N_PHI: usize = 2000;
/// Cusp threshold in units of the median absolute slope difference.
pub const CUSP_FACTOR: f64 = 10.0;
/// Gaussian smoothing window, in samples, applied before differentiating.
pub const SMOOTH_WINDOW: usize = 5;

#[derive(Clone, Debug, PartialEq)]
pub struct GbzPoint<T: Real> {
    pub beta: Cplx<T>,
    pub energy: Cplx<T>,
    /// `arg β` in `[0, 2π)`.
    pub theta: T,
    /// Sweep angle `φ` whose equation produced the point (zero for points
    /// built from a spectrum).
    pub phi: T,
    pub branch_id: usize,
    pub is_gbz: bool,
    pub is_cusp: bool,
    /// Size of the middle tie group; above two marks a higher-order crossing.
    pub tie_size: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Cusp<T: Real> {
    pub theta: T,
    pub beta: Cplx<T>,
    /// Jump of `d|β|/dθ` across the cusp.
    pub jump_magnitude: T,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct GbzPointSet<T: Real> {
    pub points: Vec<GbzPoint<T>>,
    pub cusps: Vec<Cusp<T>>,
}

impl<T: Real> GbzPointSet<T> {
    pub fn gbz_points(&self) -> impl Iterator<Item = &GbzPoint<T>> {
        self.points.iter().filter(|p| p.is_gbz)
    }

    pub fn branch_count(&self) -> usize {
        self.points.iter().map(|p| p.branch_id + 1).max().unwrap_or(0)
    }

    /// Geometric mean of `|β|` over the GBZ points, if any.
    pub fn mean_radius(&self) -> Option<T> {
        let (s, n) = self.gbz_points().fold((T::zero(), 0usize), |(s, n), p| (s + cabs(p.beta).ln(), n + 1));
        (n > 0).then(|| (s / T::from_usize_lossy(n)).exp())
    }
}

/// `β^l [H(β) − H(β e^{iφ})] = Σ_{n≠0} h_n (1 − e^{inφ}) β^{n+l}`.
fn sweep_poly<T: Real>(h: &LaurentPolynomial<T>, phi: T, l: usize) -> Polynomial<T> {
    let r = h.max_power();
    let mut c = vec![Complex::zero(); (r + l as i32) as usize + 1];
    for (n, hn) in h.terms() {
        if n == 0 {
            continue;
        }
        let ang = phi * T::from_i64_lossy(n as i64);
        let w = Complex::new(T::one() - ang.cos(), -ang.sin());
        c[(n + l as i32) as usize] += hn * w;
    }
    Polynomial::new(c)
}

/// Angle-sweep construction of the auxiliary GBZ.
///
/// For every `φ` on a uniform grid over `(0, 2π)` the roots of
/// `H(β) = H(β e^{iφ})` are points whose partner `β e^{iφ}` shares both the
/// modulus and the energy. Partners reappear as roots at `2π − φ`, so only
/// roots are recorded. Roots at the origin (from a vanishing constant term)
/// are discarded.
pub fn agbz_sweep<T: Real>(h: &LaurentPolynomial<T>, n_phi: usize) -> Result<GbzPointSet<T>> {
    if n_phi < 100 {
        return Err(Error::domain("agbz_sweep needs n_phi >= 100"));
    }
    let l = h.l()?;
    let scale = h.max_abs();
    let per_phi: Vec<Result<Vec<(T, Cplx<T>)>>> = (1..n_phi)
        .into_par_iter()
        .map(|k| {
            let phi = T::TAU() * T::from_usize_lossy(k) / T::from_usize_lossy(n_phi);
            let p = sweep_poly(h, phi, l).trimmed(T::of(1e-13));
            if p.len_degree() == 0 {
                return Ok(Vec::new());
            }
            let rs = roots(&p)?;
            let tiny = T::of(1e-12);
            Ok(rs
                .roots
                .into_iter()
                .filter(|b| cabs(*b) > tiny && cabs(*b) < tiny.recip())
                .filter(|b| b.re.is_finite() && b.im.is_finite())
                .map(|b| (phi, b))
                .collect())
        })
        .collect();
    let mut slices = Vec::with_capacity(per_phi.len());
    for s in per_phi {
        slices.push(s?);
    }
    let branches = track_branches(&slices);
    let mut points = Vec::new();
    for (slice, ids) in slices.iter().zip(&branches) {
        for (&(phi, beta), &branch_id) in slice.iter().zip(ids) {
            let energy = h.value(beta);
            if !(cabs(energy) < scale * T::of(1e12)) {
                continue;
            }
            points.push(GbzPoint {
                beta,
                energy,
                theta: arg_2pi(beta),
                phi,
                branch_id,
                is_gbz: false,
                is_cusp: false,
                tie_size: 0,
            });
        }
    }
    Ok(GbzPointSet { points, cusps: Vec::new() })
}

/// Continuity labelling across consecutive sweep angles: optimal matching to
/// the previous slice, with a fresh label when the match jumps too far.
fn track_branches<T: Real>(slices: &[Vec<(T, Cplx<T>)>]) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(slices.len());
    let mut prev: Vec<(Cplx<f64>, usize)> = Vec::new();
    let mut next_id = 0;
    for slice in slices {
        let cur: Vec<Cplx<f64>> = slice.iter().map(|&(_, b)| Complex::new(b.re.as_f64(), b.im.as_f64())).collect();
        let mut ids = vec![usize::MAX; cur.len()];
        if !prev.is_empty() && !cur.is_empty() {
            let n = cur.len().max(prev.len());
            let big = 1e300;
            let cost: Vec<Vec<f64>> = (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| if i < cur.len() && j < prev.len() { (cur[i] - prev[j].0).norm() } else { big })
                        .collect()
                })
                .collect();
            let assign = assignment(&cost);
            for (i, &j) in assign.iter().enumerate().take(cur.len()) {
                if j < prev.len() {
                    let d = (cur[i] - prev[j].0).norm();
                    let size = 0.5 * (cur[i].norm() + prev[j].0.norm());
                    if d <= 0.2 * size + 1e-9 {
                        ids[i] = prev[j].1;
                    }
                }
            }
        }
        for id in ids.iter_mut() {
            if *id == usize::MAX {
                *id = next_id;
                next_id += 1;
            }
        }
        prev = cur.into_iter().zip(ids.iter().copied()).collect();
        out.push(ids);
    }
    out
}

/// Marks the aGBZ points whose energy has them in the middle tie group.
pub fn gbz_filter<T: Real>(aset: &GbzPointSet<T>, h: &LaurentPolynomial<T>) -> Result<GbzPointSet<T>> {
    gbz_filter_tol(aset, h, T::of(MEMBERSHIP_TOL))
}

pub fn gbz_filter_tol<T: Real>(aset: &GbzPointSet<T>, h: &LaurentPolynomial<T>, membership_tol: T) -> Result<GbzPointSet<T>> {
    let flags: Vec<Result<(bool, usize)>> = aset
        .points
        .par_iter()
        .map(|p| {
            let mp = middle_pair(h, p.energy)?;
            Ok((mp.in_spectrum(membership_tol) && mp.contains(p.beta), mp.tie_size()))
        })
        .collect();
    let mut out = aset.clone();
    for (p, f) in out.points.iter_mut().zip(flags) {
        let (is_gbz, tie) = f?;
        p.is_gbz = is_gbz;
        p.tie_size = tie;
    }
    Ok(out)
}

/// Sweep, filter and cusp detection in one call.
pub fn gbz<T: Real>(h: &LaurentPolynomial<T>, n_phi: usize) -> Result<GbzPointSet<T>> {
    let mut set = gbz_filter(&agbz_sweep(h, n_phi)?, h)?;
    if set.gbz_points().count() >= 10 {
        set.cusps = detect_cusps(&set)?;
        mark_cusps(&mut set);
    }
    Ok(set)
}

/// Flags the GBZ point nearest to each detected cusp.
pub fn mark_cusps<T: Real>(set: &mut GbzPointSet<T>) {
    let cusps = set.cusps.clone();
    for c in &cusps {
        let best = set
            .points
            .iter()
            .enumerate()
            .filter(|(_, p)| p.is_gbz)
            .min_by(|a, b| cabs(a.1.beta - c.beta).partial_cmp(&cabs(b.1.beta - c.beta)).unwrap_or(std::cmp::Ordering::Equal))
            .map(|(i, _)| i);
        if let Some(i) = best {
            set.points[i].is_cusp = true;
        }
    }
}

/// Point cloud of middle-pair roots over the OBC eigenvalues of a chain of
/// `L` sites (the diagonalization cross-check of the GBZ).
pub fn gbz_from_spectrum(h: &LaurentPolynomial<f64>, l_sites: usize) -> Result<GbzPointSet<f64>> {
    if l_sites < 40 {
        return Err(Error::domain("gbz_from_spectrum needs L >= 40"));
    }
    let sr = obc_eigenvalues(h, l_sites, ScaleMode::Auto, Precision::Quad)?;
    let pairs: Vec<Result<_>> = sr.eigenvalues.par_iter().map(|&e| middle_pair(h, e).map(|mp| (e, mp))).collect();
    let mut points = Vec::new();
    for r in pairs {
        let (e, mp) = r?;
        for beta in [mp.beta_l, mp.beta_l1] {
            points.push(GbzPoint {
                beta,
                energy: e,
                theta: arg_2pi(beta),
                phi: 0.0,
                branch_id: 0,
                is_gbz: true,
                is_cusp: false,
                tie_size: mp.tie_size(),
            });
        }
    }
    Ok(GbzPointSet { points, cusps: Vec::new() })
}

/// Splits θ-sorted `(θ, |β|)` samples into single-valued loops by
/// continuity in `|β|`.
fn split_loops(samples: &[(f64, f64, Complex<f64>)]) -> Vec<Vec<(f64, f64, Complex<f64>)>> {
    let mut loops: Vec<Vec<(f64, f64, Complex<f64>)>> = Vec::new();
    for &s in samples {
        let best = loops
            .iter()
            .enumerate()
            .map(|(i, lp)| {
                let last = lp.last().expect("loops are never empty").1;
                (i, (s.1 - last).abs() / last.max(1e-300))
            })
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
        match best {
            Some((i, d)) if d < 0.05 => loops[i].push(s),
            _ => loops.push(vec![s]),
        }
    }
    loops
}

fn gaussian_smooth(y: &[f64], window: usize, periodic: bool) -> Vec<f64> {
    let half = (window / 2) as isize;
    let sigma = (window as f64) / 4.0;
    let w: Vec<f64> = (-half..=half).map(|k| (-(k * k) as f64 / (2.0 * sigma * sigma)).exp()).collect();
    let n = y.len() as isize;
    (0..n)
        .map(|i| {
            let (mut s, mut ws) = (0.0, 0.0);
            for (k, wk) in (-half..=half).zip(&w) {
                let j = i + k;
                let j = if periodic {
                    j.rem_euclid(n)
                } else if j < 0 || j >= n {
                    continue;
                } else {
                    j
                };
                s += wk * y[j as usize];
                ws += wk;
            }
            s / ws
        })
        .collect()
}

/// Cusps of the GBZ: angles where `∂_θ |β(θ)|` jumps.
///
/// Each single-valued loop is resampled on a uniform θ grid, smoothed with a
/// Gaussian window, differentiated, and scanned for slope differences above
/// [`CUSP_FACTOR`] times their median.
pub fn detect_cusps<T: Real>(gset: &GbzPointSet<T>) -> Result<Vec<Cusp<T>>> {
    let mut samples: Vec<(f64, f64, Complex<f64>)> = gset
        .gbz_points()
        .map(|p| (p.theta.as_f64(), cabs(p.beta).as_f64(), Complex::new(p.beta.re.as_f64(), p.beta.im.as_f64())))
        .collect();
    if samples.len() < 10 {
        return Err(Error::domain("cusp detection needs at least 10 GBZ points"));
    }
    samples.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
    let mut cusps = Vec::new();
    for lp in split_loops(&samples) {
        if lp.len() < 10 {
            continue;
        }
        cusps.extend(loop_cusps(&lp));
    }
    Ok(cusps
        .into_iter()
        .map(|(theta, beta, jump)| Cusp {
            theta: T::of(theta),
            beta: Complex::new(T::of(beta.re), T::of(beta.im)),
            jump_magnitude: T::of(jump),
        })
        .collect())
}

/// `|β|` of one loop resampled on a uniform θ grid, smoothed, with central
/// slopes and their forward differences.
struct Profile {
    m: usize,
    periodic: bool,
    thetas: Vec<f64>,
    dt: f64,
    slope: Vec<Option<f64>>,
    diff: Vec<Option<f64>>,
    rho_max: f64,
}

impl Profile {
    fn idx(&self, i: isize) -> Option<usize> {
        if self.periodic {
            Some(i.rem_euclid(self.m as isize) as usize)
        } else if i < 0 || i >= self.m as isize {
            None
        } else {
            Some(i as usize)
        }
    }

    /// Largest `|diff|` within `radius` samples of angle `theta`.
    fn peak_near(&self, theta: f64, radius: isize) -> f64 {
        let c = ((theta - self.thetas[0]) / self.dt).round() as isize;
        (c - radius..=c + radius)
            .filter_map(|i| self.idx(i).and_then(|k| self.diff[k]))
            .fold(0.0, |m, d| m.max(d.abs()))
    }
}

fn profile(lp: &[(f64, f64, Complex<f64>)], m: usize, periodic: bool) -> Option<Profile> {
    use std::f64::consts::TAU;
    let n = lp.len();
    let (t0, span) = if periodic { (0.0, TAU) } else { (lp[0].0, lp[n - 1].0 - lp[0].0) };
    if span <= 0.0 {
        return None;
    }
    let dt = if periodic { span / m as f64 } else { span / (m - 1) as f64 };
    // Linear interpolation of |β| on the uniform grid.
    let interp = |t: f64| -> f64 {
        let pos = lp.partition_point(|s| s.0 < t);
        let (a, b) = if pos == 0 || pos == n {
            if !periodic {
                return if pos == 0 { lp[0].1 } else { lp[n - 1].1 };
            }
            (lp[n - 1], (lp[0].0 + TAU, lp[0].1, lp[0].2))
        } else {
            (lp[pos - 1], lp[pos])
        };
        let (ta, tb) = if pos == 0 { (a.0 - TAU, b.0 - TAU) } else { (a.0, b.0) };
        if tb - ta <= 0.0 {
            return a.1;
        }
        let u = (t - ta) / (tb - ta);
        a.1 + u * (b.1 - a.1)
    };
    let thetas: Vec<f64> = (0..m).map(|i| t0 + dt * i as f64).collect();
    let rho: Vec<f64> = thetas.iter().map(|&t| interp(t)).collect();
    let rho = gaussian_smooth(&rho, SMOOTH_WINDOW, periodic);
    let mut p = Profile {
        m,
        periodic,
        thetas,
        dt,
        slope: Vec::new(),
        diff: Vec::new(),
        rho_max: rho.iter().fold(0.0f64, |a, &b| a.max(b)),
    };
    p.slope = (0..m as isize)
        .map(|i| match (p.idx(i - 1), p.idx(i + 1)) {
            (Some(a), Some(b)) => Some((rho[b] - rho[a]) / (2.0 * dt)),
            _ => None,
        })
        .collect();
    p.diff = (0..m as isize)
        .map(|i| match (p.idx(i + 1).and_then(|j| p.slope[j]), p.slope[i as usize]) {
            (Some(a), Some(b)) => Some(a - b),
            _ => None,
        })
        .collect();
    Some(p)
}

/// Coarse-grid factor for the kink confirmation.
const COARSE: usize = 4;

fn loop_cusps(lp: &[(f64, f64, Complex<f64>)]) -> Vec<(f64, Complex<f64>, f64)> {
    use std::f64::consts::TAU;
    let n = lp.len();
    // Largest angular hole decides whether the loop closes around the origin.
    let mut max_gap = lp[0].0 + TAU - lp[n - 1].0;
    for w in lp.windows(2) {
        max_gap = max_gap.max(w[1].0 - w[0].0);
    }
    let m = n.clamp(64, 4096);
    let periodic = max_gap < 20.0 * TAU / m as f64;
    let Some(p) = profile(lp, m, periodic) else { return Vec::new() };
    let mut mags: Vec<f64> = p.diff.iter().flatten().map(|d| d.abs()).collect();
    if mags.is_empty() {
        return Vec::new();
    }
    mags.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let median = mags[mags.len() / 2];
    // Floor keeps numerically flat curves (circles) from flagging noise.
    let thresh = (CUSP_FACTOR * median).max(1e-6 * p.rho_max);
    let flagged: Vec<bool> = p.diff.iter().map(|d| d.is_some_and(|d| d.abs() > thresh)).collect();
    // A smooth bend has slope differences proportional to the grid step, a
    // kink does not: a flagged peak must survive a grid COARSE times wider.
    let coarse = profile(lp, (m / COARSE).max(32), periodic);
    // Merge runs of flagged samples (cyclically for closed loops).
    let mut out = Vec::new();
    let mut visited = vec![false; m];
    for i in 0..m {
        if !flagged[i] || visited[i] {
            continue;
        }
        let mut start = i as isize;
        if periodic && i == 0 {
            while flagged[p.idx(start - 1).unwrap()] && start > -(m as isize) {
                start -= 1;
            }
        }
        let mut best = (0.0f64, i);
        let mut j = start;
        while let Some(k) = p.idx(j) {
            if !flagged[k] || (visited[k] && j != start) {
                break;
            }
            visited[k] = true;
            let d = p.diff[k].unwrap_or(0.0).abs();
            if d > best.0 {
                best = (d, k);
            }
            j += 1;
            if j - start >= m as isize {
                break;
            }
        }
        let k = best.1;
        let theta = p.thetas[k] + 0.5 * p.dt;
        if let Some(c) = &coarse {
            if c.peak_near(theta, 2) > 2.0 * best.0 {
                continue;
            }
        }
        let before = p.idx(k as isize - 3).and_then(|a| p.slope[a]);
        let after = p.idx(k as isize + 4).and_then(|a| p.slope[a]);
        let jump = match (before, after) {
            (Some(a), Some(b)) => (b - a).abs(),
            _ => best.0,
        };
        let nearest = lp
            .iter()
            .min_by(|a, b| {
                let da = ang_dist(a.0, theta);
                let db = ang_dist(b.0, theta);
                da.partial_cmp(&db).unwrap_or(std::cmp::Ordering::Equal)
            })
            .expect("loop is non-empty");
        out.push((theta.rem_euclid(TAU), nearest.2, jump));
    }
    out
}

fn ang_dist(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(std::f64::consts::TAU);
    d.min(std::f64::consts::TAU - d)
}
