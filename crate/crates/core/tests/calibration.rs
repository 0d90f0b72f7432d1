mod common;

use common::sinc2_root;
use spdc_core::physics::reference;
use spdc_core::robustness::{auto_width_90, efficiency_ratio, flatness_metric, scale_design, sweep, width_90, RobustnessSpec};
use spdc_core::sensitivity::{calibrate, epsilon_from, width90_epsilon, Axis, CalibrationDatum, SensitivityCoefficients};
use spdc_core::{Design, Segment};

fn pp20() -> Design {
    Design::periodically_poled(0.02, reference::omega(), 37.0).unwrap()
}

#[test]
fn weak_pump_half_width_is_the_sinc_root() {
    let x = sinc2_root();
    assert!((x - 0.5592).abs() < 1e-3);
    let eps = width90_epsilon(0.02, 1e-4).unwrap();
    assert!((eps * 0.02 / 2.0 - x).abs() < 1e-9, "{}", eps * 0.01);
    assert!((eps - 2.0 * x / 0.02).abs() < 1e-6);
    let doubled = width90_epsilon(0.04, 1e-4).unwrap();
    assert!((doubled / eps - 0.5).abs() < 1e-8);
}

#[test]
fn reference_coefficients() {
    let x = sinc2_root();
    let eps90 = 2.0 * x / 0.02;
    for (width, axis) in [(0.445, Axis::Temperature), (10.64, Axis::Wavelength), (0.227, Axis::Angle)] {
        let weak = calibrate(&CalibrationDatum { crystal_length: 0.02, omega: 1e-4, width_value: width, axis }).unwrap();
        assert!((weak - eps90 / width).abs() < 1e-6 * weak, "{axis:?} {weak}");
    }
    // the reference coupling barely moves the calibration, nor does a tenfold change
    let c = SensitivityCoefficients::reference();
    let t = c.coefficient(Axis::Temperature).unwrap();
    assert!((t / (eps90 / 0.445) - 1.0).abs() < 1e-3);
    let tenth = calibrate(&CalibrationDatum { crystal_length: 0.02, omega: reference::omega() / 10.0, width_value: 0.445, axis: Axis::Temperature }).unwrap();
    let tenfold = calibrate(&CalibrationDatum { crystal_length: 0.02, omega: reference::omega() * 10.0, width_value: 0.445, axis: Axis::Temperature }).unwrap();
    assert!((tenth / t - 1.0).abs() < 1e-3 && (tenfold / t - 1.0).abs() < 2e-2, "{tenth} {t} {tenfold}");
}

#[test]
fn calibrated_deviation_maps_to_the_half_width() {
    let c = SensitivityCoefficients::reference();
    let eps = epsilon_from(&c, Axis::Temperature, 0.445).unwrap();
    assert!((eps - width90_epsilon(0.02, reference::omega()).unwrap()).abs() < 1e-10 * eps);
    assert_eq!(epsilon_from(&c, Axis::Temperature, -1.0).unwrap(), -c.dk_dt.unwrap());
}

#[test]
fn reference_sweep_reproduces_the_calibration() {
    let c = SensitivityCoefficients::reference();
    let rows = sweep(&pp20(), Axis::Temperature, &c, (-2.4, 2.4), 481).unwrap();
    let peak = rows.iter().max_by(|a, b| a.mu.total_cmp(&b.mu)).unwrap();
    assert!(peak.deviation.abs() < 1e-12);
    let w = width_90(&pp20(), Axis::Temperature, &c, (-2.4, 2.4), 481).unwrap();
    assert!((w - 0.89).abs() <= 0.01 * 0.89, "{w}");
    // within one scan cell of the exact calibration width
    assert!((w - 0.89).abs() <= 4.8 / 480.0);
    for (axis, half) in [(Axis::Wavelength, 10.64), (Axis::Angle, 0.227)] {
        let w = auto_width_90(&pp20(), axis, &c, 400).unwrap();
        assert!((w / 2.0 - half).abs() <= 0.01 * half, "{axis:?} {w}");
    }
    // unimodal: normalized rate rises to the peak and falls after it
    let i = rows.iter().position(|r| r.normalized == 1.0).unwrap();
    assert!(rows[..=i].windows(2).all(|p| p[1].mu >= p[0].mu));
    assert!(rows[i..].windows(2).all(|p| p[1].mu <= p[0].mu));
}

#[test]
fn flatness_examples() {
    let c = SensitivityCoefficients::reference();
    let spec = RobustnessSpec { half_window: 1.0, ..RobustnessSpec::default() };
    let zero = Design::new("dark", vec![Segment::new(0.0, 0.0, 0.01).unwrap()], 37.0).unwrap();
    assert!(flatness_metric(&zero, &spec, &c, 129).is_err());
    // a design with no temperature response is perfectly flat
    let flat = SensitivityCoefficients { dk_dt: Some(1e-30), ..c.clone() };
    assert!(flatness_metric(&pp20(), &spec, &flat, 129).unwrap() < 1e-40);
    let f129 = flatness_metric(&pp20(), &spec, &c, 129).unwrap();
    let f513 = flatness_metric(&pp20(), &spec, &c, 513).unwrap();
    assert!((f129 - f513).abs() < 1e-8 * f513);
}

#[test]
fn linear_rate_flatness_oracle() {
    // (1/2T)∫(a t)² dt = a²T²/3 on Simpson's rule, which is exact for quadratics
    let a = 0.1;
    let v = spdc_core::robustness::simpson(|t| Ok((a * t).powi(2)), -1.0, 1.0, 129).unwrap() / 2.0;
    assert!((v - 1.0 / 300.0).abs() < 1e-15);
}

#[test]
fn efficiency_of_the_reference_is_one() {
    assert!((efficiency_ratio(&pp20()).unwrap() - 1.0).abs() < 1e-15);
}

#[test]
fn scaled_widths_follow_the_scaling_law() {
    let d = Design::new(
        "pair",
        vec![Segment::new(40.0, 900.0, 0.004).unwrap(), Segment::new(40.0, -900.0, 0.004).unwrap()],
        37.0,
    )
    .unwrap();
    let c = SensitivityCoefficients::reference();
    let w = auto_width_90(&d, Axis::Epsilon, &c, 2000).unwrap();
    for r in [0.5, 2.0, 10.0] {
        let ws = auto_width_90(&scale_design(&d, r).unwrap(), Axis::Epsilon, &c, 2000).unwrap();
        assert!((ws * r - w).abs() <= 1e-6 * w, "r {r}: {} vs {w}", ws * r);
    }
    assert_eq!(scale_design(&d, 1.0).unwrap(), d);
    assert!(scale_design(&d, 0.0).is_err() && scale_design(&d, -1.0).is_err());
}

#[test]
fn zero_width_sweep_is_one_row() {
    let rows = sweep(&pp20(), Axis::Epsilon, &SensitivityCoefficients::default(), (0.0, 0.0), 481).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].normalized, 1.0);
}
