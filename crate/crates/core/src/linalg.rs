//! Small dense linear algebra over generic scalars.
//!
//! Everything here is sized for the problems in this crate: determinants of
//! Sylvester matrices (tens of rows), companion matrices, and Toeplitz
//! matrices of a few hundred sites. Nothing is blocked or vectorized.

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{cabs, Cplx, Real};

/// Row-major square matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Dense<S> {
    n: usize,
    data: Vec<S>,
}

impl<S: Copy + Zero> Dense<S> {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![S::zero(); n * n] }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> S {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: S) {
        self.data[i * self.n + j] = v;
    }

    #[inline]
    fn at(&mut self, i: usize, j: usize) -> &mut S {
        &mut self.data[i * self.n + j]
    }

    pub fn map<U: Copy + Zero>(&self, f: impl Fn(S) -> U) -> Dense<U> {
        Dense { n: self.n, data: self.data.iter().map(|&x| f(x)).collect() }
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.n..(i + 1) * self.n]
    }
}

#[inline]
fn l1<T: Real>(z: Cplx<T>) -> T {
    z.re.abs() + z.im.abs()
}

/// LU factorization with partial pivoting, in place. Returns the pivot sign
/// and whether a zero pivot was met.
fn lu_in_place<T: Real>(a: &mut Dense<Cplx<T>>, perm: &mut [usize]) -> (T, bool) {
    let n = a.n;
    let mut sign = T::one();
    let mut singular = false;
    for (i, p) in perm.iter_mut().enumerate() {
        *p = i;
    }
    for k in 0..n {
        let mut piv = k;
        let mut best = l1(a.get(k, k));
        for i in k + 1..n {
            let v = l1(a.get(i, k));
            if v > best {
                best = v;
                piv = i;
            }
        }
        if best == T::zero() {
            singular = true;
            continue;
        }
        if piv != k {
            for j in 0..n {
                a.data.swap(k * n + j, piv * n + j);
            }
            perm.swap(k, piv);
            sign = -sign;
        }
        let inv: Cplx<T> = Complex::new(T::one(), T::zero()) / a.get(k, k);
        for i in k + 1..n {
            let f = a.get(i, k) * inv;
            if f.is_zero() {
                continue;
            }
            a.set(i, k, f);
            for j in k + 1..n {
                let u = a.get(k, j);
                *a.at(i, j) -= f * u;
            }
        }
    }
    (sign, singular)
}

/// Determinant by LU with partial pivoting.
pub fn det<T: Real>(mut a: Dense<Cplx<T>>) -> Cplx<T> {
    let n = a.n;
    if n == 0 {
        return Complex::one();
    }
    let mut perm = vec![0; n];
    let (sign, singular) = lu_in_place(&mut a, &mut perm);
    if singular {
        return Complex::zero();
    }
    let mut d = Complex::new(sign, T::zero());
    for i in 0..n {
        d *= a.get(i, i);
    }
    d
}

/// Solves `a x = b`. Fails when a pivot vanishes exactly.
pub fn solve<T: Real>(mut a: Dense<Cplx<T>>, b: &[Cplx<T>]) -> Result<Vec<Cplx<T>>> {
    let n = a.n;
    let mut perm = vec![0; n];
    let (_, singular) = lu_in_place(&mut a, &mut perm);
    if singular {
        return Err(Error::numerical("singular linear system"));
    }
    let mut x: Vec<Cplx<T>> = perm.iter().map(|&p| b[p]).collect();
    for i in 0..n {
        for j in 0..i {
            let l = a.get(i, j);
            let xj = x[j];
            x[i] -= l * xj;
        }
    }
    for i in (0..n).rev() {
        for j in i + 1..n {
            let u = a.get(i, j);
            let xj = x[j];
            x[i] -= u * xj;
        }
        x[i] /= a.get(i, i);
    }
    Ok(x)
}

/// Right eigenvector for a known eigenvalue by inverse iteration.
pub fn inverse_iteration<T: Real>(a: &Dense<Cplx<T>>, lambda: Cplx<T>) -> Result<Vec<Cplx<T>>> {
    let n = a.n;
    let scale = a.data.iter().fold(T::zero(), |m, &z| m.max(cabs(z))).max(T::one());
    // Nudge off the exact eigenvalue so the shifted matrix is invertible.
    let shift = lambda + Complex::new(scale * T::epsilon().sqrt() * T::of(1e-2), T::zero());
    let mut m = a.clone();
    for i in 0..n {
        *m.at(i, i) -= shift;
    }
    let mut x = vec![Complex::new(T::one(), T::zero()); n];
    for _ in 0..3 {
        x = solve(m.clone(), &x)?;
        let norm = x.iter().fold(T::zero(), |s, &z| s + z.norm_sqr()).sqrt();
        if !(norm > T::zero()) {
            return Err(Error::numerical("inverse iteration collapsed"));
        }
        for z in x.iter_mut() {
            *z /= norm;
        }
    }
    Ok(x)
}

/// Parlett–Reinsch balancing by powers of two (a diagonal similarity).
fn balance<T: Real>(a: &mut Dense<T>) {
    let n = a.n;
    let radix = T::of(2.0);
    let sqrdx = radix * radix;
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let (mut c, mut r) = (T::zero(), T::zero());
            for j in 0..n {
                if j != i {
                    c += a.get(j, i).abs();
                    r += a.get(i, j).abs();
                }
            }
            if c == T::zero() || r == T::zero() {
                continue;
            }
            let s = c + r;
            let mut f = T::one();
            let g = r / radix;
            while c < g {
                f *= radix;
                c *= sqrdx;
            }
            let g = r * radix;
            while c > g {
                f /= radix;
                c /= sqrdx;
            }
            if (c + r) / f < T::of(0.95) * s {
                done = false;
                let g = T::one() / f;
                for j in 0..n {
                    *a.at(i, j) *= g;
                    *a.at(j, i) *= f;
                }
            }
        }
    }
}

fn balance_complex<T: Real>(a: &mut Dense<Cplx<T>>) {
    let n = a.n;
    let radix = T::of(2.0);
    let sqrdx = radix * radix;
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let (mut c, mut r) = (T::zero(), T::zero());
            for j in 0..n {
                if j != i {
                    c += l1(a.get(j, i));
                    r += l1(a.get(i, j));
                }
            }
            if c == T::zero() || r == T::zero() {
                continue;
            }
            let s = c + r;
            let mut f = T::one();
            let g = r / radix;
            while c < g {
                f *= radix;
                c *= sqrdx;
            }
            let g = r * radix;
            while c > g {
                f /= radix;
                c /= sqrdx;
            }
            if (c + r) / f < T::of(0.95) * s {
                done = false;
                let g = T::one() / f;
                for j in 0..n {
                    *a.at(i, j) = a.get(i, j) * g;
                    *a.at(j, i) = a.get(j, i) * f;
                }
            }
        }
    }
}

/// Householder reduction of a real matrix to upper Hessenberg form.
fn hessenberg<T: Real>(a: &mut Dense<T>) {
    let n = a.n;
    if n < 3 {
        return;
    }
    let mut v = vec![T::zero(); n];
    for k in 0..n - 2 {
        let m = n - k - 1;
        let scale = (k + 1..n).fold(T::zero(), |s, i| s + a.get(i, k).abs());
        if scale == T::zero() {
            continue;
        }
        let mut h = T::zero();
        for i in 0..m {
            v[i] = a.get(k + 1 + i, k) / scale;
            h += v[i] * v[i];
        }
        let mut g = h.sqrt();
        if v[0] > T::zero() {
            g = -g;
        }
        h -= v[0] * g;
        v[0] -= g;
        // P = I - v v^T / h, applied from both sides.
        for j in k..n {
            let mut s = T::zero();
            for i in 0..m {
                s += v[i] * a.get(k + 1 + i, j);
            }
            let f = s / h;
            for i in 0..m {
                *a.at(k + 1 + i, j) -= f * v[i];
            }
        }
        for i in 0..n {
            let mut s = T::zero();
            for jj in 0..m {
                s += a.get(i, k + 1 + jj) * v[jj];
            }
            let f = s / h;
            for jj in 0..m {
                *a.at(i, k + 1 + jj) -= f * v[jj];
            }
        }
        a.set(k + 1, k, scale * g);
        for i in k + 2..n {
            a.set(i, k, T::zero());
        }
    }
}

fn hessenberg_complex<T: Real>(a: &mut Dense<Cplx<T>>) {
    let n = a.n;
    if n < 3 {
        return;
    }
    let mut v = vec![Complex::zero(); n];
    for k in 0..n - 2 {
        let m = n - k - 1;
        let scale = (k + 1..n).fold(T::zero(), |s, i| s + l1(a.get(i, k)));
        if scale == T::zero() {
            continue;
        }
        let mut h = T::zero();
        for i in 0..m {
            v[i] = a.get(k + 1 + i, k) / scale;
            h += v[i].norm_sqr();
        }
        let norm = h.sqrt();
        let x0 = v[0];
        let ax0 = cabs(x0);
        let phase = if ax0 == T::zero() { Complex::one() } else { x0 / ax0 };
        let alpha = -phase * norm;
        v[0] = x0 - alpha;
        // H = I - v v^H / (v^H v / 2); v^H v = 2 (norm^2 + |x0| norm).
        let half = norm * norm + ax0 * norm;
        if half == T::zero() {
            continue;
        }
        for j in k..n {
            let mut s = Complex::zero();
            for i in 0..m {
                s += v[i].conj() * a.get(k + 1 + i, j);
            }
            let f = s / half;
            for i in 0..m {
                *a.at(k + 1 + i, j) -= v[i] * f;
            }
        }
        for i in 0..n {
            let mut s = Complex::zero();
            for jj in 0..m {
                s += a.get(i, k + 1 + jj) * v[jj];
            }
            let f = s / half;
            for jj in 0..m {
                *a.at(i, k + 1 + jj) -= f * v[jj].conj();
            }
        }
        a.set(k + 1, k, alpha * scale);
        for i in k + 2..n {
            a.set(i, k, Complex::zero());
        }
    }
}

#[inline]
fn sign<T: Real>(a: T, b: T) -> T {
    if b >= T::zero() {
        a.abs()
    } else {
        -a.abs()
    }
}

#[inline]
fn negligible<T: Real>(x: T, s: T) -> bool {
    x <= T::epsilon() * s
}

/// Francis double-shift QR on an upper Hessenberg real matrix.
///
/// Complex eigenvalues of a real matrix come out as exact conjugate pairs and
/// real ones with an exactly zero imaginary part.
fn hqr<T: Real>(a: &mut Dense<T>) -> Result<Vec<Cplx<T>>> {
    let n = a.n;
    let mut wr = vec![T::zero(); n];
    let mut wi = vec![T::zero(); n];
    let mut anorm = T::zero();
    for i in 0..n {
        for j in i.saturating_sub(1)..n {
            anorm += a.get(i, j).abs();
        }
    }
    let (half, three_q) = (T::of(0.5), T::of(0.75));
    let mut t = T::zero();
    let mut nn = n as isize - 1;
    while nn >= 0 {
        let nu = nn as usize;
        let mut its = 0;
        loop {
            let mut l = nu;
            while l >= 1 {
                let mut s = a.get(l - 1, l - 1).abs() + a.get(l, l).abs();
                if s == T::zero() {
                    s = anorm;
                }
                if negligible(a.get(l, l - 1).abs(), s) {
                    a.set(l, l - 1, T::zero());
                    break;
                }
                l -= 1;
            }
            let mut x = a.get(nu, nu);
            if l == nu {
                wr[nu] = x + t;
                wi[nu] = T::zero();
                nn -= 1;
                break;
            }
            let mut y = a.get(nu - 1, nu - 1);
            let mut w = a.get(nu, nu - 1) * a.get(nu - 1, nu);
            if l + 1 == nu {
                let p = half * (y - x);
                let q = p * p + w;
                let z = q.abs().sqrt();
                x += t;
                if q >= T::zero() {
                    let z = p + sign(z, p);
                    wr[nu - 1] = x + z;
                    wr[nu] = if z != T::zero() { x - w / z } else { x + z };
                    wi[nu - 1] = T::zero();
                    wi[nu] = T::zero();
                } else {
                    wr[nu - 1] = x + p;
                    wr[nu] = x + p;
                    wi[nu - 1] = -z;
                    wi[nu] = z;
                }
                nn -= 2;
                break;
            }
            if its == 60 {
                return Err(Error::numerical("QR iteration did not converge"));
            }
            if its == 10 || its == 20 || its == 40 {
                t += x;
                for i in 0..=nu {
                    *a.at(i, i) -= x;
                }
                let s = a.get(nu, nu - 1).abs() + a.get(nu - 1, nu - 2).abs();
                x = three_q * s;
                y = x;
                w = T::of(-0.4375) * s * s;
            }
            its += 1;
            let mut m = nu - 2;
            let (mut p, mut q, mut r);
            loop {
                let z = a.get(m, m);
                let rr = x - z;
                let ss = y - z;
                p = (rr * ss - w) / a.get(m + 1, m) + a.get(m, m + 1);
                q = a.get(m + 1, m + 1) - z - rr - ss;
                r = a.get(m + 2, m + 1);
                let s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let u = a.get(m, m - 1).abs() * (q.abs() + r.abs());
                let v = p.abs() * (a.get(m - 1, m - 1).abs() + z.abs() + a.get(m + 1, m + 1).abs());
                if negligible(u, v) {
                    break;
                }
                m -= 1;
            }
            for i in m + 2..=nu {
                a.set(i, i - 2, T::zero());
                if i != m + 2 {
                    a.set(i, i - 3, T::zero());
                }
            }
            let mut k = m;
            while k < nu {
                if k != m {
                    p = a.get(k, k - 1);
                    q = a.get(k + 1, k - 1);
                    r = if k + 1 != nu { a.get(k + 2, k - 1) } else { T::zero() };
                    x = p.abs() + q.abs() + r.abs();
                    if x != T::zero() {
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                }
                let s = sign((p * p + q * q + r * r).sqrt(), p);
                if s != T::zero() {
                    if k == m {
                        if l != m {
                            let v = a.get(k, k - 1);
                            a.set(k, k - 1, -v);
                        }
                    } else {
                        a.set(k, k - 1, -s * x);
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    let z = r / s;
                    q /= p;
                    r /= p;
                    for j in k..=nu {
                        let mut pp = a.get(k, j) + q * a.get(k + 1, j);
                        if k + 1 != nu {
                            pp += r * a.get(k + 2, j);
                            *a.at(k + 2, j) -= pp * z;
                        }
                        *a.at(k + 1, j) -= pp * y;
                        *a.at(k, j) -= pp * x;
                    }
                    let mmin = if nu < k + 3 { nu } else { k + 3 };
                    for i in l..=mmin {
                        let mut pp = x * a.get(i, k) + y * a.get(i, k + 1);
                        if k + 1 != nu {
                            pp += z * a.get(i, k + 2);
                            *a.at(i, k + 2) -= pp * r;
                        }
                        *a.at(i, k + 1) -= pp * q;
                        *a.at(i, k) -= pp;
                    }
                }
                k += 1;
            }
            if l + 1 >= nu {
                // Deflation happened inside the sweep; re-scan from the top.
            }
        }
    }
    Ok(wr.into_iter().zip(wi).map(|(r, i)| Complex::new(r, i)).collect())
}

/// Single-shift QR on an upper Hessenberg complex matrix.
fn comqr<T: Real>(a: &mut Dense<Cplx<T>>) -> Result<Vec<Cplx<T>>> {
    let n = a.n;
    let mut w = vec![Complex::zero(); n];
    if n == 0 {
        return Ok(w);
    }
    let mut anorm = T::zero();
    for i in 0..n {
        for j in i.saturating_sub(1)..n {
            anorm += l1(a.get(i, j));
        }
    }
    let mut hi = n - 1;
    let mut its = 0;
    let mut total = 0usize;
    loop {
        if hi == 0 {
            w[0] = a.get(0, 0);
            break;
        }
        let mut l = hi;
        while l >= 1 {
            let mut s = l1(a.get(l - 1, l - 1)) + l1(a.get(l, l));
            if s == T::zero() {
                s = anorm;
            }
            if negligible(l1(a.get(l, l - 1)), s) {
                a.set(l, l - 1, Complex::zero());
                break;
            }
            l -= 1;
        }
        if l == hi {
            w[hi] = a.get(hi, hi);
            hi -= 1;
            its = 0;
            continue;
        }
        its += 1;
        total += 1;
        if its > 60 || total > 60 * n {
            return Err(Error::numerical("complex QR iteration did not converge"));
        }
        let mu = if its % 11 == 0 {
            // Exceptional shift to break cycles.
            let s = a.get(hi, hi - 1).re.abs()
                + if hi >= 2 { a.get(hi - 1, hi - 2).re.abs() } else { T::zero() };
            a.get(hi, hi) + Complex::new(s, T::zero())
        } else {
            let (p, b, cc, d) = (a.get(hi - 1, hi - 1), a.get(hi - 1, hi), a.get(hi, hi - 1), a.get(hi, hi));
            let half = T::of(0.5);
            let m = (p + d) * half;
            let disc = ((p - d) * (p - d) * T::of(0.25) + b * cc).sqrt();
            let (e1, e2) = (m + disc, m - disc);
            if cabs(e1 - d) <= cabs(e2 - d) {
                e1
            } else {
                e2
            }
        };
        let mut x = a.get(l, l) - mu;
        let mut y = a.get(l + 1, l);
        for k in l..hi {
            if k > l {
                x = a.get(k, k - 1);
                y = a.get(k + 1, k - 1);
            }
            let r = (x.norm_sqr() + y.norm_sqr()).sqrt();
            if r == T::zero() {
                continue;
            }
            let c = x / r;
            let s = y / r;
            let (cb, sb) = (c.conj(), s.conj());
            let j0 = if k > l { k - 1 } else { l };
            for j in j0..=hi {
                let u = a.get(k, j);
                let v = a.get(k + 1, j);
                a.set(k, j, cb * u + sb * v);
                a.set(k + 1, j, -s * u + c * v);
            }
            let imax = if k + 2 < hi { k + 2 } else { hi };
            for i in l..=imax {
                let u = a.get(i, k);
                let v = a.get(i, k + 1);
                a.set(i, k, u * c + v * s);
                a.set(i, k + 1, -u * sb + v * cb);
            }
        }
    }
    Ok(w)
}

/// All eigenvalues of a real square matrix.
pub fn eigenvalues_real<T: Real>(a: &Dense<T>) -> Result<Vec<Cplx<T>>> {
    if a.data.iter().any(|x| !x.is_finite()) {
        return Err(Error::numerical("non-finite matrix entry"));
    }
    let mut m = a.clone();
    balance(&mut m);
    hessenberg(&mut m);
    hqr(&mut m)
}

/// All eigenvalues of a complex square matrix.
pub fn eigenvalues_complex<T: Real>(a: &Dense<Cplx<T>>) -> Result<Vec<Cplx<T>>> {
    if a.data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::numerical("non-finite matrix entry"));
    }
    let mut m = a.clone();
    balance_complex(&mut m);
    hessenberg_complex(&mut m);
    comqr(&mut m)
}

/// Minimum-cost perfect matching on a square cost matrix (Hungarian method).
/// Returns `assign[row] = column`.
pub fn assignment(cost: &[Vec<f64>]) -> Vec<usize> {
    let n = cost.len();
    if n == 0 {
        return Vec::new();
    }
    // Potentials-based O(n^3) formulation with 1-based sentinel column 0.
    let inf = f64::INFINITY;
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assign = vec![0; n];
    for j in 1..=n {
        if p[j] > 0 {
            assign[p[j] - 1] = j - 1;
        }
    }
    assign
}

/// Largest distance between optimally matched members of two equal-size
/// point sets in the complex plane.
pub fn matched_max_distance(a: &[Complex<f64>], b: &[Complex<f64>]) -> f64 {
    assert_eq!(a.len(), b.len(), "point sets must have equal size");
    let cost: Vec<Vec<f64>> = a.iter().map(|x| b.iter().map(|y| (x - y).norm()).collect()).collect();
    let assign = assignment(&cost);
    assign.iter().enumerate().fold(0.0, |m, (i, &j)| m.max(cost[i][j]))
}
