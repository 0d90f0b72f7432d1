//! Error resilience of a design against the common detuning error.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::jet::MAX_ORDER;
use crate::sensitivity::{epsilon_from, width90_epsilon, Axis, SensitivityCoefficients};
use crate::su11::{design_matrix, design_pair_mean_jet, Design, Segment};
use crate::{Error, Result};

/// Temperature window and flatness requirement around a working point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RobustnessSpec {
    /// `T_p`, °C.
    pub work_temperature: f64,
    /// `T_m`, °C.
    pub half_window: f64,
    /// Highest derivative order `M` to cancel.
    pub order: usize,
    pub flatness_threshold: f64,
}

impl Default for RobustnessSpec {
    fn default() -> Self {
        RobustnessSpec { work_temperature: 37.0, half_window: 2.4, order: 2, flatness_threshold: 0.01 }
    }
}

impl RobustnessSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.half_window > 0.0) || !(self.flatness_threshold > 0.0) {
            return Err(Error::InvalidArgument("half_window and flatness_threshold must be positive".into()));
        }
        if self.order < 1 || self.order > MAX_ORDER {
            return Err(Error::InvalidArgument(format!("order must be in 1..={MAX_ORDER}, got {}", self.order)));
        }
        Ok(())
    }
}

/// Pass/fail of one design constraint.
#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub check: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Robustness figures of merit for one design.
#[derive(Debug, Clone, PartialEq)]
pub struct RobustnessReport {
    /// `d^m|β|²/dε^m` at `ε = 0`, `m = 1..=M`.
    pub derivatives: Vec<f64>,
    pub flatness: f64,
    /// 90% full widths per calibrated axis, physical units.
    pub widths: Vec<(Axis, f64)>,
    /// Same for the periodically poled crystal of equal length and coupling.
    pub reference_widths: Vec<(Axis, f64)>,
    pub efficiency_ratio: f64,
    pub verdicts: Vec<Verdict>,
}

impl RobustnessReport {
    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }

    pub fn width(&self, axis: Axis) -> Option<f64> {
        self.widths.iter().find(|(a, _)| *a == axis).map(|(_, w)| *w)
    }

    /// Width divided by the periodically poled reference width.
    pub fn width_ratio(&self, axis: Axis) -> Option<f64> {
        let w = self.width(axis)?;
        let r = self.reference_widths.iter().find(|(a, _)| *a == axis)?.1;
        Some(w / r)
    }
}

/// Derivatives of `|β(ε)|²` at `ε = 0`, orders `1..=order`.
///
/// Computed by truncated Taylor arithmetic through the closed-form segment
/// propagators and the composite product, then checked against Richardson
/// extrapolated central differences for the first two orders.
pub fn beta2_derivatives(design: &Design, order: usize) -> Result<Vec<f64>> {
    if order < 1 || order > MAX_ORDER {
        return Err(Error::InvalidArgument(format!("order must be in 1..={MAX_ORDER}, got {order}")));
    }
    design.validate()?;
    let jet = design_pair_mean_jet(design, 0.0);
    let analytic: Vec<f64> = (1..=order).map(|m| jet.derivative(m)).collect();

    let mu0 = jet.value();
    let length = design.total_length();
    let f = |e: f64| design_matrix(design, e).map(|m| m.pair_mean());
    let h = 1e-2 / length;
    let d1 = |h: f64| -> Result<f64> { Ok((f(h)? - f(-h)?) / (2.0 * h)) };
    let d2 = |h: f64| -> Result<f64> { Ok((f(h)? - 2.0 * mu0 + f(-h)?) / (h * h)) };
    let numeric = [(4.0 * d1(h / 2.0)? - d1(h)?) / 3.0, (4.0 * d2(h / 2.0)? - d2(h)?) / 3.0];
    let scale = mu0.abs().max(f64::MIN_POSITIVE);
    for (m, (&a, &n)) in analytic.iter().zip(numeric.iter()).enumerate() {
        let norm = scale * length.powi(m as i32 + 1);
        let (a_n, n_n) = (a / norm, n / norm);
        if (a_n - n_n).abs() > 1e-6 * (1.0 + a_n.abs()) {
            return Err(Error::NumericalConsistency(format!(
                "order-{} derivative: Taylor {a:e} vs finite difference {n:e}",
                m + 1
            )));
        }
    }
    Ok(analytic)
}

/// Derivatives divided by `|β(0)|² L^m`, making them scale-free.
pub fn normalized_derivatives(design: &Design, order: usize) -> Result<Vec<f64>> {
    if order < 1 || order > MAX_ORDER {
        return Err(Error::InvalidArgument(format!("order must be in 1..={MAX_ORDER}, got {order}")));
    }
    design.validate()?;
    let jet = design_pair_mean_jet(design, 0.0);
    let mu0 = jet.value();
    if !(mu0 > 0.0) {
        return Err(Error::DegenerateDesign("|β(0)|² = 0".into()));
    }
    let length = design.total_length();
    Ok((1..=order).map(|m| jet.derivative(m) / (mu0 * length.powi(m as i32))).collect())
}

/// Composite Simpson rule over `[a, b]` with `points` samples (made odd).
pub fn simpson<F: FnMut(f64) -> Result<f64>>(mut f: F, a: f64, b: f64, points: usize) -> Result<f64> {
    let n = if points % 2 == 0 { points + 1 } else { points }.max(3);
    let intervals = n - 1;
    let h = (b - a) / intervals as f64;
    let mut acc = f(a)? + f(b)?;
    for i in 1..intervals {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + h * i as f64)?;
    }
    Ok(acc * h / 3.0)
}

/// Mean-square relative deviation of the pair rate over `T_p ± T_m`:
/// `(1/2T_m) ∫ (μ(T)/μ(T_p) - 1)² dT`.
pub fn flatness_metric(design: &Design, spec: &RobustnessSpec, coeffs: &SensitivityCoefficients, n_quadrature: usize) -> Result<f64> {
    spec.validate()?;
    let k = coeffs.coefficient(Axis::Temperature)?;
    let mu0 = design_matrix(design, 0.0)?.pair_mean();
    if !(mu0 > 0.0) {
        return Err(Error::DegenerateDesign("μ(T_p) = 0".into()));
    }
    let tm = spec.half_window;
    let integral = simpson(
        |dt| {
            let r = design_matrix(design, k * dt)?.pair_mean() / mu0 - 1.0;
            Ok(r * r)
        },
        -tm,
        tm,
        n_quadrature.max(129),
    )?;
    Ok(integral / (2.0 * tm))
}

/// Full width of the contiguous region around the scanned peak where
/// `μ ≥ 0.9 μ_peak`, linearly interpolated at the crossings.
pub fn width_90(design: &Design, axis: Axis, coeffs: &SensitivityCoefficients, scan_range: (f64, f64), scan_points: usize) -> Result<f64> {
    let k = coeffs.coefficient(axis)?;
    let (lo, hi) = scan_range;
    if !(hi > lo) || scan_points < 3 {
        return Err(Error::InvalidArgument("scan needs hi > lo and at least 3 points".into()));
    }
    let step = (hi - lo) / (scan_points - 1) as f64;
    let xs: Vec<f64> = (0..scan_points).map(|i| lo + step * i as f64).collect();
    let mus = xs.iter().map(|&x| Ok(design_matrix(design, k * x)?.pair_mean())).collect::<Result<Vec<f64>>>()?;
    width_from_samples(&xs, &mus)
}

pub(crate) fn width_from_samples(xs: &[f64], mus: &[f64]) -> Result<f64> {
    let (peak_idx, peak) = mus
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (i, m)| if m > best.1 { (i, m) } else { best });
    if !(peak > 0.0) {
        return Err(Error::DegenerateDesign("pair rate vanishes over the whole scan".into()));
    }
    let level = 0.9 * peak;
    let crossing = |inside: usize, outside: usize| {
        let (x0, x1, m0, m1) = (xs[inside], xs[outside], mus[inside], mus[outside]);
        x0 + (x1 - x0) * (m0 - level) / (m0 - m1)
    };
    let mut l = peak_idx;
    while l > 0 && mus[l - 1] >= level {
        l -= 1;
    }
    let mut r = peak_idx;
    while r + 1 < mus.len() && mus[r + 1] >= level {
        r += 1;
    }
    if l == 0 || r + 1 == mus.len() {
        return Err(Error::InsufficientRange(format!(
            "the 90% region reaches the scan edge [{}, {}]",
            xs[0],
            xs[xs.len() - 1]
        )));
    }
    Ok(crossing(r, r + 1) - crossing(l, l - 1))
}

/// [`width_90`] with a scan that grows until both crossings are enclosed.
///
/// The initial half-range is four 90% half-widths of the periodically poled
/// crystal of the same length, sampled at `points_per_side` points per side.
pub fn auto_width_90(design: &Design, axis: Axis, coeffs: &SensitivityCoefficients, points_per_side: usize) -> Result<f64> {
    let k = coeffs.coefficient(axis)?;
    let omega = design.mean_omega().max(1e-9);
    let mut half = 4.0 * width90_epsilon(design.total_length(), omega)? / k.abs();
    let mut last = None;
    for _ in 0..8 {
        match width_90(design, axis, coeffs, (-half, half), 2 * points_per_side + 1) {
            Err(e @ Error::InsufficientRange(_)) => {
                last = Some(e);
                half *= 2.0;
            }
            other => return other,
        }
    }
    Err(last.unwrap_or_else(|| Error::InsufficientRange("scan did not converge".into())))
}

/// `μ_design(0) / μ_PP(0)` against one phase-matched segment of the same total
/// length and (length-weighted mean) coupling.
pub fn efficiency_ratio(design: &Design) -> Result<f64> {
    let mu = design_matrix(design, 0.0)?.pair_mean();
    let pp = Design::periodically_poled(design.total_length(), design.mean_omega(), design.work_temperature)?;
    let mu_pp = design_matrix(&pp, 0.0)?.pair_mean();
    if !(mu_pp > 0.0) {
        return Err(Error::DegenerateDesign("the reference crystal has zero coupling".into()));
    }
    Ok(mu / mu_pp)
}

/// One row of a robustness sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub deviation: f64,
    pub mu: f64,
    /// `μ / max μ` over the sweep.
    pub normalized: f64,
}

/// Uniform sweep of a deviation axis over `[lo, hi]`.
pub fn sweep(design: &Design, axis: Axis, coeffs: &SensitivityCoefficients, range: (f64, f64), points: usize) -> Result<Vec<SweepRow>> {
    let (lo, hi) = range;
    let deviations: Vec<f64> = if lo == hi {
        alloc::vec![lo]
    } else {
        if points < 3 {
            return Err(Error::InvalidArgument(format!("a sweep needs at least 3 points, got {points}")));
        }
        let step = (hi - lo) / (points - 1) as f64;
        (0..points).map(|i| if i + 1 == points { hi } else { lo + step * i as f64 }).collect()
    };
    let mut rows = Vec::with_capacity(deviations.len());
    for d in deviations {
        let eps = epsilon_from(coeffs, axis, d)?;
        rows.push(SweepRow { deviation: d, mu: design_matrix(design, eps)?.pair_mean(), normalized: 0.0 });
    }
    let peak = rows.iter().fold(0.0f64, |m, r| m.max(r.mu));
    for r in &mut rows {
        r.normalized = if peak > 0.0 { r.mu / peak } else { 0.0 };
    }
    Ok(rows)
}

/// Lengths × r, every `Δk` and `Ω` ÷ r (pump power ÷ r²). The scaled design at
/// `ε/r` reproduces the original at `ε`.
pub fn scale_design(design: &Design, r: f64) -> Result<Design> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::InvalidArgument(format!("scale factor must be positive, got {r}")));
    }
    let segments = design
        .segments
        .iter()
        .map(|s| Segment { omega: s.omega / r, delta_k: s.delta_k / r, length: s.length * r })
        .collect();
    let scaled = Design { segments, ..design.clone() };
    scaled.validate()?;
    Ok(scaled)
}
