#![allow(dead_code)]

use proptest::prelude::*;
use spdc_core::{Complex, Design, Segment, Su11Matrix};

/// `|x - y| <= tol * max(|x|, |y|, 1)`.
pub fn close(x: Complex, y: Complex, tol: f64) -> bool {
    (x - y).norm() <= tol * x.norm().max(y.norm()).max(1.0)
}

pub fn matrices_close(a: &Su11Matrix, b: &Su11Matrix, tol: f64) -> bool {
    close(a.alpha, b.alpha, tol) && close(a.beta, b.beta, tol)
}

pub fn segment(omega: std::ops::Range<f64>, dk: std::ops::Range<f64>, length: std::ops::Range<f64>) -> impl Strategy<Value = Segment> {
    (omega, dk, length).prop_map(|(o, d, l)| Segment::new(o, d, l).unwrap())
}

/// Designs with the oracle-equivalence ranges: Ω ∈ [1, 500] rad/m,
/// Δk ∈ [-2000, 2000] rad/m, l ∈ [0.1, 10] mm, 1 to 8 segments.
pub fn oracle_design() -> impl Strategy<Value = Design> {
    prop::collection::vec(segment(1.0..500.0, -2000.0..2000.0, 1e-4..1e-2), 1..=8)
        .prop_map(|s| Design::new("random", s, 37.0).unwrap())
}

/// Moderate-gain designs: Ω ∈ [0.1, 50] rad/m, same detunings and lengths.
pub fn moderate_design() -> impl Strategy<Value = Design> {
    prop::collection::vec(segment(0.1..50.0, -2000.0..2000.0, 1e-4..1e-2), 1..=8)
        .prop_map(|s| Design::new("random", s, 37.0).unwrap())
}

/// Root of `sin²(x)/x² = 0.9` by bisection.
pub fn sinc2_root() -> f64 {
    let f = |x: f64| (x.sin() / x).powi(2) - 0.9;
    let (mut lo, mut hi) = (0.1, 1.5);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid
        } else {
            hi = mid
        }
    }
    0.5 * (lo + hi)
}
