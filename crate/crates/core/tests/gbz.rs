mod common;

use common::*;
use nonbloch::spectra::hausdorff_one_sided;
use nonbloch::{
    agbz_sweep, coalescence_pairs, gbz, gbz_filter, gbz_from_spectrum, middle_pair, saddle_points, Complex64, Laurent64,
};
use proptest::prelude::*;

const GC_THIRD: f64 = 0.07862125089107162;

#[test]
fn hatano_nelson_gbz_is_a_circle() {
    for g in [0.2, 0.6] {
        let set = gbz(&hn(g).hamiltonian(), 400).unwrap();
        let want = ((1.0 - g) / (1.0 + g)).sqrt();
        assert!(set.gbz_points().count() > 100);
        for p in set.gbz_points() {
            assert!((p.beta.norm() - want).abs() < 1e-10, "{}", p.beta.norm());
        }
        assert!(set.cusps.is_empty());
    }
}

#[test]
fn hermitian_limit_is_the_unit_circle() {
    for fam in [third(0.0), second(0.0), hermitian_third(0.5, -0.3)] {
        let set = gbz(&fam.hamiltonian(), 1000).unwrap();
        assert!(set.gbz_points().count() > 100);
        for p in set.gbz_points() {
            assert!((p.beta.norm() - 1.0).abs() < 1e-8);
        }
    }
}

fn hermitian_third(t2: f64, t3: f64) -> nonbloch::Family64 {
    nonbloch::Family64::third_neighbor(1.0, t2, t3, 0.0)
}

#[test]
fn diagonalization_agrees_with_the_sweep() {
    let h = third(0.02).hamiltonian();
    let curve: Vec<Complex64> = gbz(&h, 2000).unwrap().gbz_points().map(|p| p.beta).collect();
    let cloud: Vec<Complex64> = gbz_from_spectrum(&h, 80).unwrap().points.iter().map(|p| p.beta).collect();
    let d = hausdorff_one_sided(&cloud, &curve);
    assert!(d < 5e-2, "spectrum to sweep: {d}");
    assert!(gbz_from_spectrum(&h, 10).is_err());
}

#[test]
fn cusps_appear_at_coalescing_saddles() {
    let h = third(GC_THIRD).hamiltonian();
    let set = gbz(&h, 2000).unwrap();
    assert!(!set.cusps.is_empty());
    let s = saddle_points(&h).unwrap();
    let pairs = coalescence_pairs(&s, 1e-5);
    for p in &pairs {
        for k in [p.i, p.j] {
            if s[k].on_gbz {
                let d = set.cusps.iter().map(|c| (c.beta - s[k].beta_s).norm()).fold(f64::INFINITY, f64::min);
                assert!(d < 2e-2, "saddle {} is {d} from the nearest cusp", s[k].beta_s);
            }
        }
    }
    assert!(gbz(&third(0.02).hamiltonian(), 2000).unwrap().cusps.is_empty());
    assert_eq!(set.points.iter().filter(|p| p.is_cusp).count(), set.cusps.len());
}

fn small_real_model() -> impl Strategy<Value = Laurent64> {
    (1..=2i32, 1..=2i32, prop::collection::vec(-1.0..1.0f64, 5)).prop_map(|(l, r, v)| {
        Laurent64::from_real_terms(
            &(-l..=r)
                .map(|n| {
                    let a = v[(n + 2) as usize];
                    (n, if n == -l || n == r { a + 0.3f64.copysign(a) } else { a })
                })
                .collect::<Vec<_>>(),
        )
    })
}

proptest! {
    #![proptest_config(config(20))]

    #[test]
    fn gbz_points_are_aux_points_with_a_tied_middle_pair(h in small_real_model()) {
        let aset = agbz_sweep(&h, 400).unwrap();
        let g = gbz_filter(&aset, &h).unwrap();
        prop_assert_eq!(g.points.len(), aset.points.len());
        for (p, q) in g.points.iter().zip(&aset.points) {
            prop_assert_eq!(p.beta, q.beta);
            if p.is_gbz {
                let mp = middle_pair(&h, p.energy).unwrap();
                let gap = (mp.beta_l.norm() - mp.beta_l1.norm()).abs() / mp.beta_l.norm().max(1e-300);
                prop_assert!(gap < 1e-6, "gap {}", gap);
                let hit = [mp.beta_l, mp.beta_l1].iter().any(|b| (b.norm() - p.beta.norm()).abs() < 1e-6 * p.beta.norm());
                prop_assert!(hit);
            }
        }
    }
}
