mod common;

use common::*;
use nonbloch::linalg::matched_max_distance;
use nonbloch::{
    agbz_sweep, classify_order, coalescence_pairs, max_imag_derivative_check, obc_eigenvalues, saddle_points, Complex64,
    Laurent64, Precision, ScaleMode,
};
use proptest::prelude::*;

const GC_THIRD: f64 = 0.07862125089107162;
const GC_SECOND: f64 = 0.3090582303009398;

#[test]
fn hatano_nelson_saddles() {
    let s = saddle_points(&hn(0.6).hamiltonian()).unwrap();
    assert_eq!(s.len(), 2);
    for (p, e) in s.iter().zip([-1.6, 1.6]) {
        assert!((p.energy_s - c(e, 0.0)).norm() < 1e-12);
        assert_eq!(p.order_k, 2);
        assert!(p.on_gbz);
        assert!((p.beta_s.norm() - 0.5).abs() < 1e-12);
    }
}

#[test]
fn order_classification() {
    let h = Laurent64::from_real_terms(&[(-1, 1.0), (1, 3.0), (2, -1.0)]);
    assert_eq!(classify_order(&h, c(1.0, 0.0)).unwrap(), 3);
    assert!(classify_order(&h, c(2.0, 0.0)).is_err());
    let h = Laurent64::from_real_terms(&[(-1, 2.0), (2, 1.0)]);
    assert_eq!(classify_order(&h, c(1.0, 0.0)).unwrap(), 2);
}

#[test]
fn coalescence_at_and_below_threshold() {
    let s = saddle_points(&third(GC_THIRD).hamiltonian()).unwrap();
    let pairs = coalescence_pairs(&s, 1e-5);
    assert!(pairs.iter().any(|p| s[p.i].on_gbz || s[p.j].on_gbz), "{pairs:?}");
    assert!(pairs.iter().all(|p| !p.shares_beta));
    let s = saddle_points(&third(0.02).hamiltonian()).unwrap();
    assert!(coalescence_pairs(&s, 1e-5).is_empty());

    // The second-neighbor chain breaks through a single third-order saddle.
    let s = saddle_points(&second(GC_SECOND).hamiltonian()).unwrap();
    let pairs = coalescence_pairs(&s, 1e-5);
    assert!(pairs.iter().any(|p| p.shares_beta), "{pairs:?}");
    assert!(s.iter().any(|p| p.order_k == 3 && p.on_gbz));
}

#[test]
fn imaginary_energy_slope_matches_the_saddle_formula() {
    let chk = max_imag_derivative_check(&third(0.0), 0.12, 1e-4).unwrap();
    assert!(chk.relative_error() < 1e-4, "{chk:?}");
    let chk = max_imag_derivative_check(&hn(0.0), 1.2, 1e-4).unwrap();
    assert!(chk.relative_error() < 1e-4, "{chk:?}");
    for k in 1..=10 {
        let g = GC_THIRD * (1.0 + k as f64 / 10.0);
        let chk = max_imag_derivative_check(&third(0.0), g, 1e-5).unwrap();
        assert!(chk.formula.is_finite() && chk.finite_difference.is_finite(), "{g}: {chk:?}");
    }
    assert!(max_imag_derivative_check(&third(0.0), 0.02, 1e-4).is_err());
}

#[test]
fn real_spectrum_band_edges_are_saddle_energies() {
    for fam in [third(0.02), third(0.06), second(0.2), hn(0.6)] {
        let h = fam.hamiltonian();
        let sr = obc_eigenvalues(&h, 200, ScaleMode::Auto, Precision::DoubleDouble).unwrap();
        let on: Vec<f64> = saddle_points(&h).unwrap().iter().filter(|s| s.on_gbz).map(|s| s.energy_s.re).collect();
        let lo = sr.eigenvalues.first().unwrap().re;
        let hi = sr.eigenvalues.last().unwrap().re;
        for edge in [lo, hi] {
            let d = on.iter().map(|e| (e - edge).abs()).fold(f64::INFINITY, f64::min);
            assert!(d < 1e-2, "edge {edge} is {d} from the nearest on-GBZ saddle {on:?}");
        }
    }
}

fn small_real_model() -> impl Strategy<Value = Laurent64> {
    (1..=3i32, 1..=3i32, prop::collection::vec(-1.0..1.0f64, 7)).prop_map(|(l, r, v)| {
        Laurent64::from_real_terms(
            &(-l..=r)
                .map(|n| {
                    let a = v[(n + 3) as usize];
                    (n, if n == -l || n == r { a + 0.3f64.copysign(a) } else { a })
                })
                .collect::<Vec<_>>(),
        )
    })
}

proptest! {
    #![proptest_config(config(30))]

    #[test]
    fn saddle_count_and_conjugation(h in small_real_model()) {
        let s = saddle_points(&h).unwrap();
        prop_assert_eq!(s.len(), h.l().unwrap() + h.r().unwrap());
        let e: Vec<Complex64> = s.iter().map(|p| p.energy_s).collect();
        let conj: Vec<Complex64> = e.iter().map(|z| z.conj()).collect();
        prop_assert!(matched_max_distance(&e, &conj) < 1e-8 * h.abs_sum());
        for p in &s {
            prop_assert!(p.order_k >= 2);
            prop_assert!(h.derivative_value(p.beta_s, 1).norm() < 1e-8 * h.abs_sum() * (1.0 + 1.0 / p.beta_s.norm()));
        }
    }

    #[test]
    fn saddles_lie_on_the_auxiliary_gbz(h in small_real_model()) {
        let aset = agbz_sweep(&h, 2000).unwrap();
        for p in saddle_points(&h).unwrap() {
            let d = aset.points.iter().map(|q| (q.beta - p.beta_s).norm()).fold(f64::INFINITY, f64::min);
            prop_assert!(d < 1e-2 * p.beta_s.norm().max(1.0), "saddle {} is {} from the aGBZ", p.beta_s, d);
        }
    }
}
