mod common;

use common::*;
use nonbloch::spectra::complex_fraction_at;
use nonbloch::threshold::Refinement;
use nonbloch::{
    coalescence_pairs, phase_boundary, pt_threshold, saddle_points, Family64, Laurent64, Precision, ScaleMode, SweepOptions,
    ThresholdOptions,
};
use proptest::prelude::*;

const GC_THIRD: f64 = 0.07862125089107162;
const GC_SECOND: f64 = 0.3090582303009398;

#[test]
fn reference_thresholds() {
    let t = pt_threshold(&third(0.0), (0.0, 0.5)).unwrap();
    let gc = t.gamma_c.unwrap();
    assert!((gc - GC_THIRD).abs() < 1e-10, "{gc}");
    assert!((gc - 0.0786).abs() < 5e-4);
    let cr = t.critical().unwrap();
    assert!((cr.degenerate_energy.re + 0.5096072).abs() < 1e-6 && cr.real_energy);

    let t = pt_threshold(&second(0.0), (0.0, 0.5)).unwrap();
    assert!((t.gamma_c.unwrap() - GC_SECOND).abs() < 1e-9);
    assert_eq!(t.critical().unwrap().refinement, Refinement::Merged);

    // Hatano-Nelson breaks where the hopping in one direction vanishes.
    let t = pt_threshold(&hn(0.0), (0.0, 1.5)).unwrap();
    let cr = t.critical().unwrap();
    assert!((cr.gamma - 1.0).abs() < 1e-10);
    assert!(cr.ep_limit);
}

#[test]
fn diagnostics_and_domain_errors() {
    let t = pt_threshold(&third(0.0), (0.0, 0.05)).unwrap();
    assert!(t.gamma_c.is_none());
    assert!(t.diagnostic.is_some());
    let flat = Family64::new(third(0.0).base, Laurent64::zero(), 0.0);
    let t = pt_threshold(&flat, (0.0, 1.0)).unwrap();
    assert!(t.gamma_c.is_none() && t.diagnostic.unwrap().starts_with("no transition"));

    let mut complex = third(0.0);
    complex.gamma_coupling = Laurent64::from_terms([(-1, c(0.0, 1.0)), (1, c(1.0, 0.0))]);
    assert!(pt_threshold(&complex, (0.0, 0.5)).is_err());
    assert!(pt_threshold(&third(0.0), (-0.1, 0.5)).is_err());
    assert!(pt_threshold(&third(0.0), (0.3, 0.2)).is_err());
}

#[test]
fn thresholdless_models_break_at_zero() {
    let fam = Family64::third_neighbor(1.0, 0.2, 0.36, 0.0);
    let t = pt_threshold(&fam, (0.0, 0.5)).unwrap();
    assert_eq!(t.gamma_c, Some(0.0));
    assert_eq!(t.critical().unwrap().refinement, Refinement::Origin);
    let sr = nonbloch::obc_eigenvalues(&fam.at(0.01), 200, ScaleMode::Auto, Precision::DoubleDouble).unwrap();
    assert!(sr.complex_fraction > 0.0);

    // D vanishes to high order at γ = 0 where the threshold reaches zero.
    let edge = Family64::third_neighbor(1.0, 0.2, 0.32, 0.0);
    assert_eq!(pt_threshold(&edge, (0.0, 0.5)).unwrap().gamma_c, Some(0.0));
    let near = pt_threshold(&Family64::third_neighbor(1.0, 0.2, 0.3, 0.0), (0.0, 0.5)).unwrap();
    let gc = near.gamma_c.unwrap();
    assert!(gc > 0.0044 && gc < 0.0048, "{gc}");
    assert!(near.candidates.iter().all(|c| c.gamma >= 0.0));
}

#[test]
fn complex_fraction_switches_on_at_the_threshold() {
    let opts = SweepOptions { size: 200, precision: Precision::DoubleDouble, ..SweepOptions::default() };
    for (fam, gc) in [(third(0.0), GC_THIRD), (second(0.0), GC_SECOND)] {
        assert_eq!(complex_fraction_at(&fam.with_gamma(0.9 * gc), &opts).unwrap(), 0.0);
        assert!(complex_fraction_at(&fam.with_gamma(1.1 * gc), &opts).unwrap() > 0.0);
    }
}

#[test]
fn critical_energy_is_a_saddle_coalescence() {
    for (fam, gc) in [(third(0.0), GC_THIRD), (second(0.0), GC_SECOND)] {
        let cr = pt_threshold(&fam, (0.0, 0.5)).unwrap().critical().unwrap().clone();
        let s = saddle_points(&fam.at(gc)).unwrap();
        let pairs = coalescence_pairs(&s, 1e-5);
        assert!(pairs.iter().any(|p| (s[p.i].energy_s - cr.degenerate_energy).norm() < 1e-5), "{pairs:?}");
    }
}

#[test]
fn boundary_scan_matches_single_runs() {
    let vals = [0.0, 0.12, 0.2, 0.28, 0.36];
    let pts = phase_boundary(&third(0.0), "t3", &vals, (0.0, 0.5), &ThresholdOptions::default()).unwrap();
    let want = [0.0513908, 0.1888760, 0.0786213, 0.0135701, 0.0];
    for (p, w) in pts.iter().zip(want) {
        assert!((p.gamma_c.unwrap() - w).abs() < 1e-6, "t3={}: {:?}", p.value, p.gamma_c);
        let direct = pt_threshold(&third(0.0).with_parameter("t3", p.value).unwrap(), (0.0, 0.5)).unwrap();
        assert_eq!(direct.gamma_c, p.gamma_c);
    }
    assert!(phase_boundary(&third(0.0), "mu", &vals, (0.0, 0.5), &ThresholdOptions::default()).is_err());
}

proptest! {
    #![proptest_config(config(12))]

    /// `c·H0 + γV` breaks at `c·γ_c`.
    #[test]
    fn threshold_scales_with_the_base(t2 in 0.05..0.3f64, t3 in 0.1..0.28f64, k in 1..4u32) {
        let c = [0.5, 2.0, 3.0][k as usize - 1];
        let fam = Family64::third_neighbor(1.0, t2, t3, 0.0);
        let base = pt_threshold(&fam, (0.0, 0.5)).unwrap().gamma_c;
        let scaled = pt_threshold(&fam.scale_base(c), (0.0, 0.5 * c)).unwrap().gamma_c;
        match (base, scaled) {
            (Some(a), Some(b)) => prop_assert!((b - c * a).abs() < 1e-6 * c.max(1.0), "{} vs {}", b, c * a),
            (None, None) => {}
            other => prop_assert!(false, "{:?}", other),
        }
    }
}
