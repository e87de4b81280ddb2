mod common;

use common::*;
use nonbloch::linalg::matched_max_distance;
use nonbloch::resultant::saddle_resultant;
use nonbloch::{
    discriminant_gamma, resultant_at, roots, saddle_energy_poly, saddle_points, Complex64, Laurent64, Polynomial64,
};
use proptest::prelude::*;

#[test]
fn resultant_examples() {
    let lin = |a: f64| Polynomial64::from_real(&[-a, 1.0]);
    assert!((resultant_at(&lin(2.0), &lin(5.0)).unwrap() - c(-3.0, 0.0)).norm() < 1e-14);
    assert!(resultant_at(&lin(3.0), &lin(3.0)).unwrap().norm() < 1e-14);
    assert!(resultant_at(&Polynomial64::from_real(&[-1.0, 0.0, 1.0]), &lin(1.0)).unwrap().norm() < 1e-14);
    assert!(resultant_at(&Polynomial64::new(vec![]), &lin(1.0)).is_err());
    // Band edge of the Hatano-Nelson chain is a saddle energy.
    let h = hn(0.6).hamiltonian();
    assert!(saddle_resultant(&h, c(1.6, 0.0)).unwrap().norm() < 1e-12);
    assert!(saddle_resultant(&h, c(1.0, 0.0)).unwrap().norm() > 1e-2);
}

fn sorted_roots(p: &Polynomial64) -> Vec<Complex64> {
    let mut r = roots(p).unwrap().roots;
    r.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    r
}

#[test]
fn saddle_energy_poly_examples() {
    let g = saddle_energy_poly(&hn(0.6).hamiltonian()).unwrap();
    let r = sorted_roots(&g.poly);
    assert_eq!(r.len(), 2);
    assert!((r[0] + c(1.6, 0.0)).norm() < 1e-10 && (r[1] - c(1.6, 0.0)).norm() < 1e-10);
    let r = sorted_roots(&saddle_energy_poly(&hn(0.0).hamiltonian()).unwrap().poly);
    assert!((r[0] + c(2.0, 0.0)).norm() < 1e-10 && (r[1] - c(2.0, 0.0)).norm() < 1e-10);
    // At the threshold two roots of g merge on the real axis.
    let g = saddle_energy_poly(&third(0.0786212508910716).hamiltonian()).unwrap();
    let r = sorted_roots(&g.poly);
    let near: Vec<_> = r.iter().filter(|z| (*z - c(-0.5096071885, 0.0)).norm() < 1e-5).collect();
    assert_eq!(near.len(), 2, "{r:?}");
}

#[test]
fn discriminant_examples() {
    let d = discriminant_gamma(&hn(0.0), (0.0, 1.5)).unwrap();
    assert!(!d.degenerate);
    assert!(d.roots.iter().any(|z| (z - c(1.0, 0.0)).norm() < 1e-8), "{:?}", d.roots);
    // Thresholds are double roots of D, so the raw roots split by about sqrt(eps).
    for (fam, gc) in [(third(0.0), 0.0786), (second(0.0), 0.3091)] {
        let d = discriminant_gamma(&fam, (0.0, 0.5)).unwrap();
        assert!(d.roots.iter().any(|z| z.im.abs() < 1e-4 && (z.re - gc).abs() < 5e-4), "{:?}", d.roots);
    }
    let flat = nonbloch::Family64::new(hn(0.0).base, Laurent64::zero(), 0.0);
    assert!(discriminant_gamma(&flat, (0.0, 1.0)).unwrap().degenerate);
}

#[test]
fn discriminant_is_even_for_the_third_neighbor_chain() {
    let d = discriminant_gamma(&third(0.0), (0.0, 0.5)).unwrap();
    let coeffs = d.coefficients();
    let scaled: Vec<f64> = coeffs.iter().enumerate().map(|(k, z)| z.norm() * d.radius.powi(k as i32)).collect();
    let max = scaled.iter().cloned().fold(0.0, f64::max);
    let odd = scaled.iter().skip(1).step_by(2).cloned().fold(0.0, f64::max);
    assert!(odd < 1e-6 * max, "odd/max = {}", odd / max);
    for g in [0.05, 0.13, 0.31] {
        let (a, b) = (d.eval(c(g, 0.0)), d.eval(c(-g, 0.0)));
        assert!((a - b).norm() <= 1e-6 * (a.norm() + b.norm()) + 1e-12 * max);
    }
}

fn small_model() -> impl Strategy<Value = Laurent64> {
    (1..=3i32, 1..=3i32, prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 7)).prop_map(|(l, r, v)| {
        Laurent64::from_terms((-l..=r).map(|n| {
            let (a, b) = v[(n + 3) as usize];
            let end = if n == -l || n == r { 0.3f64.copysign(a) } else { 0.0 };
            (n, c(a + end, b))
        }))
    })
}

proptest! {
    #![proptest_config(config(50))]

    #[test]
    fn g_roots_are_the_saddle_energies(h in small_model()) {
        let g = saddle_energy_poly(&h).unwrap();
        let mut ge = roots(&g.poly).unwrap().roots;
        let mut se: Vec<Complex64> = saddle_points(&h).unwrap().iter().map(|s| s.energy_s).collect();
        prop_assert_eq!(ge.len(), se.len());
        let scale = h.abs_sum();
        ge.sort_by(|a, b| a.re.total_cmp(&b.re));
        se.sort_by(|a, b| a.re.total_cmp(&b.re));
        let d = matched_max_distance(&ge, &se);
        prop_assert!(d < 1e-6 * scale, "distance {}", d);
    }

    #[test]
    fn interpolated_g_matches_direct_resultant(h in small_model(), pts in prop::collection::vec((0.0..1.0f64, 0.0..6.3f64), 20)) {
        let g = saddle_energy_poly(&h).unwrap();
        let big = (0..16).map(|k| g.eval(Complex64::from_polar(g.radius, k as f64 * 0.39)).norm()).fold(0.0, f64::max);
        for (rho, th) in pts {
            let e = Complex64::from_polar(rho * g.radius * 0.9, th);
            let direct = saddle_resultant(&h, e).unwrap();
            prop_assert!((g.eval(e) - direct).norm() < 1e-6 * (direct.norm() + 1e-4 * big));
        }
    }

    #[test]
    fn resultant_detects_common_roots(
        fr in prop::collection::vec((-1.5..1.5f64, -1.5..1.5f64), 1..5),
        gr in prop::collection::vec((-1.5..1.5f64, -1.5..1.5f64), 1..5),
        plant in any::<bool>(),
    ) {
        let mut fr: Vec<Complex64> = fr.into_iter().map(|(a, b)| c(a, b)).collect();
        let gr: Vec<Complex64> = gr.into_iter().map(|(a, b)| c(a, b)).collect();
        if plant {
            fr[0] = gr[0];
        }
        let f = Polynomial64::from_roots(&fr);
        let g = Polynomial64::from_roots(&gr);
        let norm = f.max_abs().powi(g.len_degree() as i32) * g.max_abs().powi(f.len_degree() as i32);
        let res = resultant_at(&f, &g).unwrap().norm() / norm;
        let gap = fr.iter().flat_map(|a| gr.iter().map(move |b| (a - b).norm())).fold(f64::INFINITY, f64::min);
        if plant {
            prop_assert!(res < 1e-10, "planted root but |Res| = {}", res);
        } else if gap > 1e-2 {
            prop_assert!(res > 1e-14, "no common root but |Res| = {}", res);
        }
    }
}
