#![allow(dead_code)]

use nonbloch::{Complex64, Family64};
use proptest::test_runner::{Config, RngSeed};

pub fn config(cases: u32) -> Config {
    Config { cases, rng_seed: RngSeed::Fixed(0x5eed), failure_persistence: None, ..Config::default() }
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// The third-neighbor chain at its reference hoppings.
pub fn third(gamma: f64) -> Family64 {
    Family64::third_neighbor(1.0, 0.2, 0.2, gamma)
}

/// The second-neighbor chain whose threshold is a third-order saddle.
pub fn second(gamma: f64) -> Family64 {
    Family64::second_neighbor(1.0, 0.1, gamma)
}

pub fn hn(gamma: f64) -> Family64 {
    Family64::hatano_nelson(1.0, gamma)
}
