mod common;

use common::{close, matrices_close, oracle_design};
use proptest::prelude::*;
use spdc_core::designer::{build_family, AntisymmetricFamily};
use spdc_core::ode::ode_oracle;
use spdc_core::physics::{compute_kappa, PumpPhysics};
use spdc_core::su11::{design_matrix, segment_matrix, trajectory};
use spdc_core::{Complex, Design, Segment};

const STEPS: usize = 2_000_000;

fn single(omega: f64, dk: f64, length: f64) -> Design {
    Design::new("one", vec![Segment::new(omega, dk, length).unwrap()], 37.0).unwrap()
}

#[test]
fn harmonic_quarter_period_gain() {
    let d = single(100.0, 250.0, std::f64::consts::PI / 150.0);
    let ode = ode_oracle(&d, 0.0, STEPS).unwrap();
    assert!((ode.pair_mean() - 16.0 / 9.0).abs() < 1e-8 * 16.0 / 9.0);
    let closed = segment_matrix(&d.segments[0], 0.0).unwrap();
    assert!(matrices_close(&closed, &ode, 1e-8));
}

#[test]
fn phase_matched_unit_gain() {
    let d = single(50.0, 0.0, 0.02);
    let ode = ode_oracle(&d, 0.0, STEPS).unwrap();
    assert!(close(ode.alpha, Complex::new(1f64.cosh(), 0.0), 1e-8));
    assert!(close(ode.beta, Complex::new(0.0, -1f64.sinh()), 1e-8));
}

#[test]
fn six_segment_antisymmetric_design() {
    for (h, omega) in [([1616.462, 415.666, -6308.142], 2.395), ([900.0, -400.0, 1500.0], 150.0)] {
        let d = build_family(&AntisymmetricFamily { half_detunings: h.to_vec(), omega }).unwrap();
        for eps in [0.0, 37.0, -120.0] {
            let closed = design_matrix(&d, eps).unwrap();
            let ode = ode_oracle(&d, eps, STEPS).unwrap();
            assert!(matrices_close(&closed, &ode, 1e-8), "eps {eps}: {closed:?} vs {ode:?}");
            let rel = (closed.pair_mean() - ode.pair_mean()).abs() / ode.pair_mean();
            assert!(rel < 1e-8, "{rel}");
        }
    }
}

#[test]
fn harmonic_trajectory_against_oracle() {
    let length = 4.0 * std::f64::consts::PI / 75.0;
    let d = single(100.0, 250.0, length);
    for s in trajectory(&d, 0.0, 40).unwrap().iter().skip(1) {
        let expected = 16.0 / 9.0 * (75.0 * s.z).sin().powi(2);
        assert!((s.mu - expected).abs() < 1e-10, "z {}: {} vs {expected}", s.z, s.mu);
        let ode = ode_oracle(&single(100.0, 250.0, s.z), 0.0, STEPS).unwrap();
        assert!((s.mu - ode.pair_mean()).abs() <= 1e-8 * ode.pair_mean().max(1.0));
    }
    for k in 1..=4 {
        let z = k as f64 * std::f64::consts::PI / 75.0;
        assert!(segment_matrix(&Segment::new(100.0, 250.0, z).unwrap(), 0.0).unwrap().pair_mean() < 1e-20);
    }
}

#[test]
fn all_harmonic_trajectory_is_bounded() {
    let d = Design::new(
        "mixed",
        vec![Segment::new(80.0, 0.0, 5e-3).unwrap(), Segment::new(120.0, 300.0, 4e-3).unwrap(), Segment::new(60.0, -100.0, 6e-3).unwrap()],
        37.0,
    )
    .unwrap();
    let eps = 900.0;
    let bound: f64 = d
        .segments
        .iter()
        .map(|s| {
            let g2 = (0.5 * (s.delta_k + eps)).powi(2) - s.omega * s.omega;
            assert!(g2 > 0.0);
            // single-segment |α|max + |β|max, compounded
            let r = s.omega / g2.sqrt();
            (1.0 + r * r).sqrt() + r
        })
        .product();
    let mut prefix = Vec::new();
    let samples = trajectory(&d, eps, 16).unwrap();
    for s in &samples {
        assert!(s.mu <= bound * bound);
    }
    for (j, seg) in d.segments.iter().enumerate() {
        prefix.push(*seg);
        let partial = Design::new("prefix", prefix.clone(), 37.0).unwrap();
        let ode = ode_oracle(&partial, eps, STEPS).unwrap();
        let at_boundary = &samples[16 * (j + 1)];
        assert!(matrices_close(&at_boundary.matrix, &ode, 1e-8));
    }
}

#[test]
fn doubling_pump_amplitude_quadruples_weak_gain() {
    let physics = PumpPhysics {
        chi2: 2e-11,
        n_s: 1.83,
        n_i: 1.83,
        n_p: 1.89,
        omega_s: 1.77e15,
        omega_i: 1.77e15,
        omega_p: 3.54e15,
        pump_amplitude: 1.0,
    };
    let kappa = compute_kappa(&physics).unwrap();
    let amp = 1e-3 / kappa.abs();
    let one = PumpPhysics { pump_amplitude: amp, ..physics };
    let two = PumpPhysics { pump_amplitude: 2.0 * amp, ..physics };
    let (o1, o2) = (one.omega().unwrap(), two.omega().unwrap());
    assert!((o2 / o1 - 2.0).abs() < 1e-14);
    let mu = |o: f64| ode_oracle(&single(o, 0.0, 0.01), 0.0, STEPS).unwrap().pair_mean();
    let ratio = mu(o2) / mu(o1);
    assert!((ratio - 4.0).abs() < 1e-9, "{ratio}");
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 100, ..ProptestConfig::default() })]

    #[test]
    fn closed_form_matches_integration(d in oracle_design(), eps in -500.0f64..500.0) {
        let closed = design_matrix(&d, eps).unwrap();
        let ode = ode_oracle(&d, eps, STEPS).unwrap();
        prop_assert!(matrices_close(&closed, &ode, 1e-8), "{:?} vs {:?}", closed, ode);
    }
}
