//! Polynomial roots, modulus ordering and the middle-pair query.

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::{eigenvalues_complex, eigenvalues_real, Dense};
use crate::model::LaurentPolynomial;
use crate::scalar::{arg_2pi, cabs, Cplx, Real};

/// Default relative tolerance for two moduli to count as tied.
pub const TIE_TOL: f64 = 1e-8;
/// Default relative tolerance on the middle-pair gap for spectrum membership.
pub const MEMBERSHIP_TOL: f64 = 1e-6;
/// Single-linkage radius, relative to the largest root, for multiplicity clusters.
pub const CLUSTER_RADIUS: f64 = 1e-5;

const NEWTON_STEPS: usize = 20;

/// Dense univariate polynomial with complex coefficients, lowest power first.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial<T: Real> {
    coeffs: Vec<Cplx<T>>,
}

impl<T: Real> Polynomial<T> {
    pub fn new(coeffs: Vec<Cplx<T>>) -> Self {
        Self { coeffs }
    }

    pub fn from_real(coeffs: &[T]) -> Self {
        Self { coeffs: coeffs.iter().map(|&c| Complex::new(c, T::zero())).collect() }
    }

    /// Builds a polynomial from coefficients given highest power first.
    pub fn from_descending(coeffs: &[Cplx<T>]) -> Self {
        Self { coeffs: coeffs.iter().rev().copied().collect() }
    }

    /// Monic polynomial with the given roots.
    pub fn from_roots(roots: &[Cplx<T>]) -> Self {
        let mut c = vec![Complex::new(T::one(), T::zero())];
        for &r in roots {
            let mut next = vec![Complex::zero(); c.len() + 1];
            for (i, &a) in c.iter().enumerate() {
                next[i + 1] += a;
                next[i] -= a * r;
            }
            c = next;
        }
        Self { coeffs: c }
    }

    pub fn coeffs(&self) -> &[Cplx<T>] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Cplx<T>> {
        self.coeffs
    }

    /// Coefficients with the highest power first.
    pub fn descending(&self) -> Vec<Cplx<T>> {
        self.coeffs.iter().rev().copied().collect()
    }

    /// Formal degree (length minus one); the leading coefficient may be zero.
    pub fn len_degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn max_abs(&self) -> T {
        self.coeffs.iter().fold(T::zero(), |m, &z| m.max(cabs(z)))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|z| z.is_zero())
    }

    /// Drops high-order coefficients below `rel_tol` times the largest one.
    pub fn trimmed(&self, rel_tol: T) -> Self {
        let cut = self.max_abs() * rel_tol;
        let mut n = self.coeffs.len();
        while n > 0 && cabs(self.coeffs[n - 1]) <= cut {
            n -= 1;
        }
        Self { coeffs: self.coeffs[..n].to_vec() }
    }

    pub fn eval(&self, z: Cplx<T>) -> Cplx<T> {
        self.coeffs.iter().rev().fold(Complex::zero(), |acc, &c| acc * z + c)
    }

    /// Value and first derivative by a joint Horner pass.
    pub fn eval_d(&self, z: Cplx<T>) -> (Cplx<T>, Cplx<T>) {
        let mut p = Complex::zero();
        let mut dp = Complex::zero();
        for &c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &c)| c * T::from_usize_lossy(k))
            .collect();
        Self { coeffs }
    }

    pub fn is_real(&self) -> bool {
        self.coeffs.iter().all(|z| z.im.is_zero())
    }
}

/// All roots of a polynomial with their refinement residuals.
#[derive(Clone, Debug)]
pub struct RootSet<T: Real> {
    pub roots: Vec<Cplx<T>>,
    /// `|p(root)| / max|coefficient|` after polishing.
    pub refined_residuals: Vec<T>,
    /// Indices of `roots` in ascending order of (cluster-aware) modulus.
    pub modulus_order: Vec<usize>,
    /// Multiplicity-cluster label of each root.
    pub cluster: Vec<usize>,
    /// Modulus of each root's cluster centroid.
    pub cluster_modulus: Vec<T>,
}

impl<T: Real> RootSet<T> {
    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    /// Roots sorted by modulus.
    pub fn sorted(&self) -> Vec<Cplx<T>> {
        self.modulus_order.iter().map(|&i| self.roots[i]).collect()
    }

    fn from_roots(roots: Vec<Cplx<T>>, residuals: Vec<T>) -> Self {
        let scale = roots.iter().fold(T::zero(), |m, &z| m.max(cabs(z)));
        let cluster = clusters(&roots, T::of(CLUSTER_RADIUS) * scale);
        let ncl = cluster.iter().copied().max().map_or(0, |m| m + 1);
        let mut sums = vec![(Cplx::<T>::zero(), 0usize); ncl];
        for (z, &c) in roots.iter().zip(&cluster) {
            sums[c].0 += *z;
            sums[c].1 += 1;
        }
        let cluster_modulus: Vec<T> = cluster
            .iter()
            .map(|&c| cabs(sums[c].0 / T::from_usize_lossy(sums[c].1)))
            .collect();
        let mut modulus_order: Vec<usize> = (0..roots.len()).collect();
        modulus_order.sort_by(|&a, &b| {
            cluster_modulus[a]
                .partial_cmp(&cluster_modulus[b])
                .unwrap_or(std::cmp::Ordering::Equal)
                .then_with(|| {
                    arg_2pi(roots[a]).partial_cmp(&arg_2pi(roots[b])).unwrap_or(std::cmp::Ordering::Equal)
                })
        });
        Self { roots, refined_residuals: residuals, modulus_order, cluster, cluster_modulus }
    }
}

/// Single-linkage clustering; returns a label per point, labels numbered by
/// first appearance.
pub fn clusters<T: Real>(points: &[Cplx<T>], radius: T) -> Vec<usize> {
    let n = points.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if cabs(points[i] - points[j]) <= radius {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[b.max(a)] = a.min(b);
                }
            }
        }
    }
    let mut label = vec![usize::MAX; n];
    let mut out = vec![0; n];
    let mut next = 0;
    for i in 0..n {
        let r = find(&mut parent, i);
        if label[r] == usize::MAX {
            label[r] = next;
            next += 1;
        }
        out[i] = label[r];
    }
    out
}

fn companion<T: Real>(monic_tail: &[Cplx<T>]) -> Dense<Cplx<T>> {
    // Columns hold -a_k / a_n in the last column, ones on the subdiagonal.
    let n = monic_tail.len();
    Dense::from_fn(n, |i, j| {
        if j == n - 1 {
            -monic_tail[i]
        } else if i == j + 1 {
            Complex::new(T::one(), T::zero())
        } else {
            Complex::zero()
        }
    })
}

fn polish<T: Real>(p: &Polynomial<T>, z0: Cplx<T>) -> Cplx<T> {
    let mut z = z0;
    let mut best = cabs(p.eval(z));
    for _ in 0..NEWTON_STEPS {
        if best.is_zero() {
            break;
        }
        let (v, dv) = p.eval_d(z);
        if dv.is_zero() {
            break;
        }
        let cand = z - v / dv;
        let r = cabs(p.eval(cand));
        if !(r < best) {
            break;
        }
        z = cand;
        best = r;
    }
    z
}

/// All complex roots: eigenvalues of the balanced companion matrix followed
/// by residual-guarded Newton polishing.
pub fn roots<T: Real>(p: &Polynomial<T>) -> Result<RootSet<T>> {
    if p.is_zero() {
        return Err(Error::domain("zero polynomial has no finite root set"));
    }
    let p = p.trimmed(T::zero());
    let n = p.len_degree();
    if n == 0 {
        return Ok(RootSet::from_roots(Vec::new(), Vec::new()));
    }
    let lead = p.coeffs[n];
    let tail: Vec<Cplx<T>> = p.coeffs[..n].iter().map(|&c| c / lead).collect();
    let raw = if p.is_real() {
        let m = companion(&tail).map(|z| z.re);
        eigenvalues_real(&m)?
    } else {
        eigenvalues_complex(&companion(&tail))?
    };
    let scale = p.max_abs();
    let mut out = Vec::with_capacity(n);
    let mut res = Vec::with_capacity(n);
    for z in raw {
        let z = polish(&p, z);
        res.push(cabs(p.eval(z)) / scale);
        out.push(z);
    }
    Ok(RootSet::from_roots(out, res))
}

/// Roots ordered by modulus, with tie groups.
#[derive(Clone, Debug)]
pub struct ModulusOrdering<T: Real> {
    /// Roots by ascending modulus; inside a tie group by ascending argument.
    pub roots: Vec<Cplx<T>>,
    /// Cluster-aware modulus of each entry of `roots`.
    pub moduli: Vec<T>,
    /// Half-open index ranges into `roots`, one per tie group.
    pub groups: Vec<(usize, usize)>,
}

impl<T: Real> ModulusOrdering<T> {
    /// Tie group containing sorted position `pos`.
    pub fn group_of(&self, pos: usize) -> (usize, usize) {
        *self.groups.iter().find(|g| g.0 <= pos && pos < g.1).expect("position out of range")
    }
}

/// Sorts roots by modulus; consecutive moduli differing by less than
/// `tie_tol` times the largest modulus are chained into one tie group.
///
/// Moduli are taken per multiplicity cluster, so a multiple root split by
/// rounding still ties with itself.
pub fn sort_by_modulus<T: Real>(rs: &RootSet<T>, tie_tol: T) -> ModulusOrdering<T> {
    let mut idx = rs.modulus_order.clone();
    let maxm = rs.cluster_modulus.iter().fold(T::zero(), |m, &x| m.max(x));
    let tol = tie_tol * maxm;
    let mut groups = Vec::new();
    let mut start = 0;
    for k in 1..=idx.len() {
        if k == idx.len() || rs.cluster_modulus[idx[k]] - rs.cluster_modulus[idx[k - 1]] > tol {
            if k > start {
                groups.push((start, k));
            }
            start = k;
        }
    }
    for &(a, b) in &groups {
        // A chained group can mix slightly different moduli; order it by argument.
        idx[a..b].sort_by(|&x, &y| {
            arg_2pi(rs.roots[x]).partial_cmp(&arg_2pi(rs.roots[y])).unwrap_or(std::cmp::Ordering::Equal)
        });
    }
    let roots = idx.iter().map(|&i| rs.roots[i]).collect();
    let moduli = idx.iter().map(|&i| rs.cluster_modulus[i]).collect();
    ModulusOrdering { roots, moduli, groups }
}

/// Result of the middle-pair query for one energy.
#[derive(Clone, Debug)]
pub struct MiddlePair<T: Real> {
    /// The l-th smallest root by modulus.
    pub beta_l: Cplx<T>,
    /// The (l+1)-th smallest root by modulus.
    pub beta_l1: Cplx<T>,
    /// Relative modulus gap `||β_{l+1}| − |β_l|| / |β_l|`.
    pub gap: T,
    /// Every root in a tie group that overlaps the middle positions.
    pub middle_group: Vec<Cplx<T>>,
    pub ordering: ModulusOrdering<T>,
}

impl<T: Real> MiddlePair<T> {
    pub fn in_spectrum(&self, membership_tol: T) -> bool {
        self.gap < membership_tol
    }

    /// Whether `beta` coincides (within the cluster radius) with a root of
    /// the middle tie group.
    pub fn contains(&self, beta: Cplx<T>) -> bool {
        let scale = self.ordering.roots.iter().fold(T::zero(), |m, &z| m.max(cabs(z)));
        let rad = T::of(CLUSTER_RADIUS) * scale;
        self.middle_group.iter().any(|&z| cabs(z - beta) <= rad)
    }

    /// Size of the middle tie group; more than two flags a higher-order crossing.
    pub fn tie_size(&self) -> usize {
        self.middle_group.len()
    }
}

/// Solves `H(β) = E`, sorts the roots by modulus and reports the middle pair.
pub fn middle_pair<T: Real>(h: &LaurentPolynomial<T>, e: Cplx<T>) -> Result<MiddlePair<T>> {
    middle_pair_tol(h, e, T::of(TIE_TOL))
}

pub fn middle_pair_tol<T: Real>(h: &LaurentPolynomial<T>, e: Cplx<T>, tie_tol: T) -> Result<MiddlePair<T>> {
    let l = h.l()?;
    let rs = roots(&h.char_poly(e))?;
    if rs.len() < l + 1 {
        return Err(Error::numerical("characteristic polynomial lost degree"));
    }
    let ord = sort_by_modulus(&rs, tie_tol);
    let (m0, m1) = (ord.moduli[l - 1], ord.moduli[l]);
    let gap = if m0.is_zero() {
        if m1.is_zero() {
            T::zero()
        } else {
            T::infinity()
        }
    } else {
        (m1 - m0).abs() / m0
    };
    let g0 = ord.group_of(l - 1);
    let g1 = ord.group_of(l);
    let (a, b) = (g0.0.min(g1.0), g0.1.max(g1.1));
    Ok(MiddlePair {
        beta_l: ord.roots[l - 1],
        beta_l1: ord.roots[l],
        gap,
        middle_group: ord.roots[a..b].to_vec(),
        ordering: ord,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn roots_of_x2_minus_1() {
        let rs = roots(&Polynomial::from_real(&[-1.0, 0.0, 1.0])).unwrap();
        let s = rs.sorted();
        assert_eq!(s.len(), 2);
        assert!(s.iter().any(|z| (z - c(1.0, 0.0)).norm() < 1e-14));
        assert!(s.iter().any(|z| (z + c(1.0, 0.0)).norm() < 1e-14));
    }

    #[test]
    fn double_root_clusters() {
        let p = Polynomial::from_roots(&[c(0.5, 0.0), c(0.5, 0.0), c(-2.0, 0.0)]);
        let rs = roots(&p).unwrap();
        let near: Vec<_> = rs.roots.iter().filter(|z| (*z - c(0.5, 0.0)).norm() < 1e-4).collect();
        assert_eq!(near.len(), 2);
        assert!(rs.roots.iter().any(|z| (z - c(-2.0, 0.0)).norm() < 1e-10));
        let i = rs.roots.iter().position(|z| (z - c(0.5, 0.0)).norm() < 1e-4).unwrap();
        let j = rs.roots.iter().rposition(|z| (z - c(0.5, 0.0)).norm() < 1e-4).unwrap();
        assert_eq!(rs.cluster[i], rs.cluster[j]);
    }

    #[test]
    fn sort_example() {
        let p = Polynomial::from_roots(&[c(2.0, 0.0), c(-1.0, 0.0), c(0.0, 0.5)]);
        let ord = sort_by_modulus(&roots(&p).unwrap(), 1e-8);
        let want = [c(0.0, 0.5), c(-1.0, 0.0), c(2.0, 0.0)];
        for (z, w) in ord.roots.iter().zip(&want) {
            assert!((z - w).norm() < 1e-12);
        }
        assert_eq!(ord.groups.len(), 3);
    }

    #[test]
    fn unit_roots_tie() {
        let ord = sort_by_modulus(&roots(&Polynomial::from_real(&[-1.0, 0.0, 1.0])).unwrap(), 1e-8);
        assert_eq!(ord.groups, vec![(0, 2)]);
        // Ascending argument inside the group: +1 (arg 0) before -1 (arg π).
        assert!(ord.roots[0].re > 0.0);
    }

    #[test]
    fn zero_polynomial_is_an_error() {
        assert!(roots(&Polynomial::<f64>::from_real(&[0.0, 0.0])).is_err());
        assert!(roots(&Polynomial::from_real(&[3.0])).unwrap().is_empty());
    }
}
