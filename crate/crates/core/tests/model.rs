mod common;

use common::*;
use nonbloch::{Laurent64, ModelFile};
use proptest::prelude::*;

#[test]
fn evaluation_examples() {
    let hn1 = Laurent64::from_real_terms(&[(-1, 1.0), (1, 1.0)]);
    assert!((hn1.evaluate(c(1.0, 0.0)).unwrap() - c(2.0, 0.0)).norm() < 1e-15);
    for g in [0.0, 0.05, 0.3] {
        assert!((third(g).hamiltonian().evaluate(c(1.0, 0.0)).unwrap() - c(2.8, 0.0)).norm() < 1e-14);
    }
    let h = hn(0.5).hamiltonian();
    assert!((h.evaluate(c(0.0, 1.0)).unwrap() - c(0.0, 1.0)).norm() < 1e-15);
    assert!(h.evaluate(c(0.0, 0.0)).unwrap_err().is_domain());
}

#[test]
fn derivative_examples() {
    let d = Laurent64::from_real_terms(&[(-1, 1.0), (1, 1.0)]).derivative();
    assert_eq!((d.min_power(), d.max_power()), (-2, 0));
    assert_eq!(d.coeff(0), c(1.0, 0.0));
    assert_eq!(d.coeff(-2), c(-1.0, 0.0));
    assert!(Laurent64::from_real_terms(&[(0, 3.0)]).derivative().is_zero());
}

#[test]
fn char_poly_layout() {
    let h = hn(0.6).hamiltonian();
    let f = h.char_poly(c(0.7, 0.0));
    assert_eq!(f.descending(), vec![c(1.6, 0.0), c(-0.7, 0.0), c(0.4, 0.0)]);
    let f = third(0.05).hamiltonian().char_poly(c(0.3, 0.0));
    let want = [0.2, 0.2, 1.05, -0.3, 0.95, 0.2, 0.2];
    for (got, w) in f.descending().iter().zip(want) {
        assert!((got - c(w, 0.0)).norm() < 1e-15);
    }
}

#[test]
fn model_file_round_trip() {
    let text = r#"{"base": {"-3": 0.2, "-2": 0.2, "-1": 1.0, "1": 1.0, "2": 0.2, "3": 0.2},
                  "gamma_coupling": {"-1": -1.0, "1": 1.0}, "gamma": 0.02}"#;
    let fam = ModelFile::from_json(text).unwrap().to_family().unwrap();
    assert_eq!(fam, third(0.02));
    assert_eq!(fam.hamiltonian().l().unwrap(), 3);
    assert_eq!(ModelFile::from_family(&fam).to_family().unwrap(), fam);
    assert!(ModelFile::from_json(r#"{"base": {"1": 1.0, "2": 0.5}}"#).unwrap().to_family().unwrap_err().is_domain());
    assert!(ModelFile::from_json(r#"{"base": {}}"#).unwrap().to_family().is_err());
    assert!(ModelFile::from_json(r#"{"base": {"-1": 1}, "extra": 1}"#).is_err());
    assert!(ModelFile::from_json(r#"{"base": {"-1": "one", "1": 1}}"#).is_err());
    let cplx = ModelFile::from_json(r#"{"base": {"-1": [1.0, 0.5], "1": 1.0}}"#).unwrap().to_family().unwrap();
    assert!(!cplx.realness_certificate().is_pt_symmetric);
}

fn small_model() -> impl Strategy<Value = Laurent64> {
    (1..=3i32, 1..=3i32, prop::collection::vec(-1.0..1.0f64, 14), prop::collection::vec(-1.0..1.0f64, 14))
        .prop_map(|(l, r, re, im)| {
            let terms = (-l..=r).map(|n| {
                let k = (n + 3) as usize;
                let mut z = c(re[k], im[k]);
                // Keep both ends clearly nonzero.
                if n == -l || n == r {
                    z += c(0.3f64.copysign(re[k]), 0.0);
                }
                (n, z)
            });
            Laurent64::from_terms(terms)
        })
}

proptest! {
    #![proptest_config(config(100))]

    #[test]
    fn bloch_dispersion(k in 0.0..std::f64::consts::TAU, g in -0.5..0.5f64) {
        let h = third(g).hamiltonian();
        let want = 2.0 * k.cos() + 0.4 * (2.0 * k).cos() + 0.4 * (3.0 * k).cos();
        let got = h.evaluate(c(k.cos(), k.sin())).unwrap();
        prop_assert!((got - c(want, 2.0 * g * k.sin())).norm() < 1e-12);
    }

    #[test]
    fn derivative_is_linear(a in small_model(), b in small_model(), s in -2.0..2.0f64, beta in (0.3..2.0f64, 0.0..6.3f64)) {
        let z = c(beta.0 * beta.1.cos(), beta.0 * beta.1.sin());
        let lhs = (&a + &(&b * c(s, 0.0))).derivative().value(z);
        let rhs = a.derivative().value(z) + b.derivative().value(z) * s;
        prop_assert!((lhs - rhs).norm() < 1e-10 * (1.0 + rhs.norm()));
    }

    #[test]
    fn char_poly_roots_solve_h(h in small_model(), e in (-2.0..2.0f64, -2.0..2.0f64)) {
        let e = c(e.0, e.1);
        let rs = nonbloch::roots(&h.char_poly(e)).unwrap();
        prop_assert_eq!(rs.len(), h.l().unwrap() + h.r().unwrap());
        for b in rs.roots {
            prop_assert!((h.value(b) - e).norm() < 1e-8, "residual {}", (h.value(b) - e).norm());
        }
    }
}
