//! Anti-symmetric composite-segment designs and their fabrication patterns.
//!
//! A family of `N` segments is fixed by `N/2` detunings: the second half
//! mirrors the first with flipped sign, `Δk_{N+1-j} = -Δk_j`, every segment
//! shares the coupling `Ω`, and each segment is a harmonic-regime quarter
//! period long, `L_j = π / (2 √((Δk_j/2)² - Ω²))`. The search drives the low
//! order derivatives of `|β(ε)|²` at `ε = 0` to zero.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::lm::{self, LmOptions};
use crate::robustness::{
    auto_width_90, beta2_derivatives, efficiency_ratio, flatness_metric, normalized_derivatives, RobustnessReport,
    RobustnessSpec, Verdict,
};
use crate::sensitivity::{Axis, SensitivityCoefficients};
use crate::su11::{Design, Segment};
use crate::{Error, Result};

/// `N/2` detunings of an anti-symmetric design with uniform coupling.
#[derive(Debug, Clone, PartialEq)]
pub struct AntisymmetricFamily {
    /// `Δk_1 .. Δk_{N/2}`, rad/m.
    pub half_detunings: Vec<f64>,
    /// `Ω`, rad/m.
    pub omega: f64,
}

impl AntisymmetricFamily {
    pub fn n_segments(&self) -> usize {
        2 * self.half_detunings.len()
    }

    /// Full detuning sequence `[Δk_1, …, Δk_{N/2}, -Δk_{N/2}, …, -Δk_1]`.
    pub fn detunings(&self) -> Vec<f64> {
        let mut d = self.half_detunings.clone();
        d.extend(self.half_detunings.iter().rev().map(|v| -v));
        d
    }
}

/// Quarter-period length `π / (2 √((Δk/2)² - Ω²))` of a harmonic segment.
pub fn quarter_period_length(delta_k: f64, omega: f64) -> Option<f64> {
    let half = 0.5 * delta_k;
    let g2 = half * half - omega * omega;
    (g2 > 0.0).then(|| PI / (2.0 * g2.sqrt()))
}

pub fn build_family(family: &AntisymmetricFamily) -> Result<Design> {
    if family.half_detunings.is_empty() {
        return Err(Error::InvalidArgument("a family needs at least one detuning".into()));
    }
    if !(family.omega >= 0.0) {
        return Err(Error::InvalidArgument(format!("omega must be non-negative, got {}", family.omega)));
    }
    let mut segments = Vec::with_capacity(family.n_segments());
    for (index, dk) in family.detunings().into_iter().enumerate() {
        let length = quarter_period_length(dk, family.omega).ok_or_else(|| Error::RegimeViolation {
            index,
            reason: format!("(Δk/2)² = {} does not exceed Ω² = {}", 0.25 * dk * dk, family.omega * family.omega),
        })?;
        segments.push(Segment::new(family.omega, dk, length)?);
    }
    let mut design = Design::new(format!("antisymmetric-{}", family.n_segments()), segments, 37.0)?;
    design.metadata.insert("family".into(), "antisymmetric".into());
    Ok(design)
}

/// Normalized derivatives `d^m|β|²/dε^m / (|β(0)|² L^m)`, `m = 1..=order`.
pub fn residuals(family: &AntisymmetricFamily, order: usize) -> Result<Vec<f64>> {
    normalized_derivatives(&build_family(family)?, order)
}

/// Fabrication and performance limits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DesignConstraints {
    /// Smallest manufacturable poling domain, m.
    pub min_domain_width: f64,
    /// Lowest acceptable `μ_design / μ_PP`.
    pub efficiency_floor: f64,
    pub flatness: RobustnessSpec,
    pub max_total_length: f64,
    /// Material mismatch compensated by poling, rad/m; needed for the
    /// domain-width check.
    pub delta_k_material: Option<f64>,
}

impl DesignConstraints {
    pub fn validate(&self) -> Result<()> {
        if !(self.min_domain_width > 0.0) {
            return Err(Error::InvalidArgument("min_domain_width must be positive".into()));
        }
        if !(self.max_total_length > 0.0) {
            return Err(Error::InvalidArgument("max_total_length must be positive".into()));
        }
        self.flatness.validate()
    }
}

pub const CHECK_FLATNESS: &str = "flatness";
pub const CHECK_EFFICIENCY: &str = "efficiency";
pub const CHECK_FABRICATION: &str = "fabrication";
pub const CHECK_LENGTH: &str = "total_length";
pub const CHECK_DERIVATIVES: &str = "derivatives";

/// Quadrature points used for the flatness verdict.
pub const FLATNESS_QUADRATURE: usize = 257;

/// Evaluate every constraint; failures are reported, never raised.
pub fn validate(design: &Design, constraints: &DesignConstraints, coeffs: &SensitivityCoefficients) -> RobustnessReport {
    let mut verdicts = Vec::new();

    let derivatives = match beta2_derivatives(design, constraints.flatness.order) {
        Ok(d) => {
            verdicts.push(Verdict { check: CHECK_DERIVATIVES, passed: true, detail: "Taylor and finite differences agree".into() });
            d
        }
        Err(e) => {
            verdicts.push(Verdict { check: CHECK_DERIVATIVES, passed: false, detail: e.to_string() });
            Vec::new()
        }
    };

    let flatness = flatness_metric(design, &constraints.flatness, coeffs, FLATNESS_QUADRATURE).unwrap_or(f64::INFINITY);
    verdicts.push(Verdict {
        check: CHECK_FLATNESS,
        passed: flatness < constraints.flatness.flatness_threshold,
        detail: format!("{flatness:.3e} vs threshold {}", constraints.flatness.flatness_threshold),
    });

    let efficiency = efficiency_ratio(design).unwrap_or(0.0);
    verdicts.push(Verdict {
        check: CHECK_EFFICIENCY,
        passed: efficiency >= constraints.efficiency_floor,
        detail: format!("{efficiency:.4} vs floor {}", constraints.efficiency_floor),
    });

    verdicts.push(fabrication_verdict(design, constraints));

    let length = design.total_length();
    verdicts.push(Verdict {
        check: CHECK_LENGTH,
        passed: length <= constraints.max_total_length * (1.0 + 1e-12),
        detail: format!("{length:.6e} m vs max {:.6e} m", constraints.max_total_length),
    });

    let reference = Design::periodically_poled(length, design.mean_omega(), design.work_temperature);
    let mut widths = Vec::new();
    let mut reference_widths = Vec::new();
    for axis in Axis::physical() {
        if coeffs.coefficient(axis).is_err() {
            continue;
        }
        if let Ok(w) = auto_width_90(design, axis, coeffs, 600) {
            widths.push((axis, w));
        }
        if let Some(Ok(w)) = reference.as_ref().ok().map(|r| auto_width_90(r, axis, coeffs, 600)) {
            reference_widths.push((axis, w));
        }
    }

    RobustnessReport { derivatives, flatness, widths, reference_widths, efficiency_ratio: efficiency, verdicts }
}

fn fabrication_verdict(design: &Design, constraints: &DesignConstraints) -> Verdict {
    let Some(dk_mat) = constraints.delta_k_material else {
        return Verdict { check: CHECK_FABRICATION, passed: true, detail: "not checked: no material mismatch given".into() };
    };
    for (i, s) in design.segments.iter().enumerate() {
        if let Err(e) = domain_half_period(s, i, dk_mat, constraints.min_domain_width) {
            return Verdict { check: CHECK_FABRICATION, passed: false, detail: e.to_string() };
        }
    }
    Verdict { check: CHECK_FABRICATION, passed: true, detail: "all domains above the minimum width".into() }
}

fn domain_half_period(segment: &Segment, index: usize, delta_k_material: f64, min_domain_width: f64) -> Result<f64> {
    let k = delta_k_material - segment.delta_k;
    let period = 2.0 * PI / k;
    if !(period > 0.0) || !period.is_finite() {
        return Err(Error::Fabrication { index, reason: format!("poling period {period:e} m is not positive") });
    }
    let half = 0.5 * period;
    if half < min_domain_width {
        return Err(Error::Fabrication {
            index,
            reason: format!("domain width {half:.4e} m is below the limit {min_domain_width:.4e} m"),
        });
    }
    Ok(half)
}

/// Multi-start search settings.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    /// Even, in `2..=8`.
    pub n_segments: usize,
    pub omega: f64,
    /// Derivative order `M` to cancel.
    pub order: usize,
    pub starts: usize,
    pub seed: u64,
    /// Largest `|Δk_j|` sampled for start points, rad/m.
    pub max_detuning: f64,
    /// Start points keep `|Δk_j| > 2Ω(1 + margin)`.
    pub regime_margin: f64,
    /// Extra residual `L/L_target - 1` when set.
    pub target_total_length: Option<f64>,
    pub work_temperature: f64,
    pub lm: LmOptions,
    /// A start converges when every residual is below this.
    pub convergence_tolerance: f64,
}

impl SolveOptions {
    pub fn new(n_segments: usize, omega: f64) -> Self {
        SolveOptions {
            n_segments,
            omega,
            order: 2,
            starts: 64,
            seed: 0,
            max_detuning: 2.0e4,
            regime_margin: 0.05,
            target_total_length: None,
            work_temperature: 37.0,
            lm: LmOptions::default(),
            convergence_tolerance: 1e-8,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !matches!(self.n_segments, 2 | 4 | 6 | 8) {
            return Err(Error::InvalidArgument(format!("n_segments must be 2, 4, 6 or 8, got {}", self.n_segments)));
        }
        if self.starts == 0 {
            return Err(Error::InvalidArgument("starts must be at least 1".into()));
        }
        if !(self.omega > 0.0) {
            return Err(Error::InvalidArgument("omega must be positive".into()));
        }
        if self.order < 1 || self.order > crate::jet::MAX_ORDER {
            return Err(Error::InvalidArgument(format!("order must be in 1..=4, got {}", self.order)));
        }
        if !(self.max_detuning > 2.0 * self.omega * (1.0 + self.regime_margin)) {
            return Err(Error::InvalidArgument("max_detuning must exceed the harmonic threshold 2Ω(1+margin)".into()));
        }
        if let Some(t) = self.target_total_length {
            if !(t > 0.0) {
                return Err(Error::InvalidArgument("target_total_length must be positive".into()));
            }
        }
        Ok(())
    }
}

/// A converged design that passed validation.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub family: AntisymmetricFamily,
    pub design: Design,
    pub report: RobustnessReport,
    pub max_residual: f64,
    pub start_index: usize,
}

/// What became of one start.
#[derive(Debug, Clone, PartialEq)]
pub enum StartOutcome {
    Accepted(Candidate),
    /// Converged but failed the listed checks.
    Rejected { failed: Vec<&'static str> },
    NotConverged,
}

/// Search summary.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Diagnostics {
    pub starts: usize,
    pub converged: usize,
    pub accepted: usize,
    /// Converged starts failing each check.
    pub failures: BTreeMap<&'static str, usize>,
}

impl Diagnostics {
    /// The check that rejected the most converged starts.
    pub fn dominant_failure(&self) -> Option<(&'static str, usize)> {
        self.failures.iter().max_by_key(|(_, n)| **n).map(|(k, n)| (*k, *n))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    /// Sorted by flatness, best first.
    pub candidates: Vec<Candidate>,
    pub diagnostics: Diagnostics,
}

fn halton(mut index: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while index > 0 {
        f /= base as f64;
        r += f * (index % base) as f64;
        index /= base;
    }
    r
}

const HALTON_BASES: [u64; 4] = [2, 3, 5, 7];

/// Deterministic start point for one index: detuning magnitudes on a shifted
/// Halton grid (log-uniform), signs from a seeded stream, then rescaled
/// toward the target length.
pub fn start_point(opts: &SolveOptions, start_index: usize) -> AntisymmetricFamily {
    let half = opts.n_segments / 2;
    let mut shift_rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let shifts: Vec<f64> = (0..half).map(|_| (shift_rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64).collect();
    let mut sign_rng = ChaCha8Rng::seed_from_u64(opts.seed);
    sign_rng.set_stream(start_index as u64 + 1);
    let sign_bits = sign_rng.next_u64();

    let lo = 2.0 * opts.omega * (1.0 + opts.regime_margin);
    let hi = opts.max_detuning;
    let mut mags: Vec<f64> = (0..half)
        .map(|j| {
            let u = (halton(start_index as u64 + 1, HALTON_BASES[j]) + shifts[j]).fract();
            lo * (hi / lo).powf(u)
        })
        .collect();
    if let Some(target) = opts.target_total_length {
        let length: f64 = mags.iter().map(|&m| 2.0 * quarter_period_length(m, opts.omega).unwrap_or(0.0)).sum();
        if length > 0.0 {
            let factor = length / target;
            mags.iter_mut().for_each(|m| *m = (*m * factor).clamp(lo, hi));
        }
    }
    let half_detunings = mags
        .into_iter()
        .enumerate()
        .map(|(j, m)| if sign_bits >> j & 1 == 1 { -m } else { m })
        .collect();
    AntisymmetricFamily { half_detunings, omega: opts.omega }
}

// |Δk_j| = 2Ω + 2 e^{x_j}
fn to_params(family: &AntisymmetricFamily) -> Vec<f64> {
    family.half_detunings.iter().map(|d| ((d.abs() - 2.0 * family.omega) / 2.0).ln()).collect()
}

fn from_params(x: &[f64], signs: &[f64], omega: f64) -> AntisymmetricFamily {
    let half_detunings = x.iter().zip(signs).map(|(xi, s)| s * (2.0 * omega + 2.0 * xi.exp())).collect();
    AntisymmetricFamily { half_detunings, omega }
}

fn objective(family: &AntisymmetricFamily, order: usize, target: Option<f64>) -> Option<Vec<f64>> {
    let design = build_family(family).ok()?;
    let mut r = normalized_derivatives(&design, order).ok()?;
    if let Some(t) = target {
        r.push(design.total_length() / t - 1.0);
    }
    r.iter().all(|v| v.is_finite()).then_some(r)
}

/// Converge from `start` with damped Gauss-Newton; returns the final family and
/// its largest residual.
pub fn refine(start: &AntisymmetricFamily, opts: &SolveOptions) -> Option<(AntisymmetricFamily, f64)> {
    let signs: Vec<f64> = start.half_detunings.iter().map(|d| d.signum()).collect();
    let x0 = to_params(start);
    if x0.iter().any(|v| !v.is_finite()) {
        return None;
    }
    let out = lm::minimize(
        |x| objective(&from_params(x, &signs, start.omega), opts.order, opts.target_total_length),
        &x0,
        &opts.lm,
    )?;
    let family = if out.x == x0 { start.clone() } else { from_params(&out.x, &signs, start.omega) };
    Some((family, out.max_residual()))
}

/// Run one start to completion.
pub fn solve_start(opts: &SolveOptions, constraints: &DesignConstraints, coeffs: &SensitivityCoefficients, start_index: usize) -> StartOutcome {
    let start = start_point(opts, start_index);
    solve_from(&start, opts, constraints, coeffs, start_index)
}

/// Run the refinement and validation from an explicit start point.
pub fn solve_from(
    start: &AntisymmetricFamily,
    opts: &SolveOptions,
    constraints: &DesignConstraints,
    coeffs: &SensitivityCoefficients,
    start_index: usize,
) -> StartOutcome {
    let Some((family, max_residual)) = refine(start, opts) else {
        return StartOutcome::NotConverged;
    };
    if !(max_residual < opts.convergence_tolerance) {
        return StartOutcome::NotConverged;
    }
    let Ok(mut design) = build_family(&family) else {
        return StartOutcome::NotConverged;
    };
    design.work_temperature = opts.work_temperature;
    design.name = format!("dmcs-{}seg", opts.n_segments);
    let report = validate(&design, constraints, coeffs);
    if report.passed() {
        StartOutcome::Accepted(Candidate { family, design, report, max_residual, start_index })
    } else {
        let failed = report.verdicts.iter().filter(|v| !v.passed).map(|v| v.check).collect();
        StartOutcome::Rejected { failed }
    }
}

/// Deterministically combine start outcomes: sort by flatness (ties by
/// parameters), drop duplicates of an already kept design.
pub fn merge(outcomes: Vec<StartOutcome>) -> SolveResult {
    let mut diagnostics = Diagnostics { starts: outcomes.len(), ..Default::default() };
    let mut accepted = Vec::new();
    for o in outcomes {
        match o {
            StartOutcome::Accepted(c) => {
                diagnostics.converged += 1;
                accepted.push(c);
            }
            StartOutcome::Rejected { failed } => {
                diagnostics.converged += 1;
                for f in failed {
                    *diagnostics.failures.entry(f).or_insert(0) += 1;
                }
            }
            StartOutcome::NotConverged => {}
        }
    }
    accepted.sort_by(|a, b| {
        a.report
            .flatness
            .total_cmp(&b.report.flatness)
            .then_with(|| cmp_params(&a.family.half_detunings, &b.family.half_detunings))
    });
    let mut candidates: Vec<Candidate> = Vec::new();
    for c in accepted {
        let duplicate = candidates.iter().any(|k| {
            k.family
                .half_detunings
                .iter()
                .zip(&c.family.half_detunings)
                .all(|(a, b)| (a - b).abs() <= 1e-6 * a.abs().max(b.abs()))
        });
        if !duplicate {
            candidates.push(c);
        }
    }
    diagnostics.accepted = candidates.len();
    SolveResult { candidates, diagnostics }
}

fn cmp_params(a: &[f64], b: &[f64]) -> core::cmp::Ordering {
    a.iter().zip(b).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(core::cmp::Ordering::Equal)
}

/// Sequential multi-start search. Starts are independent, so callers with
/// threads may map [`solve_start`] in parallel and [`merge`] the results.
pub fn solve(opts: &SolveOptions, constraints: &DesignConstraints, coeffs: &SensitivityCoefficients) -> Result<SolveResult> {
    opts.validate()?;
    constraints.validate()?;
    let outcomes = (0..opts.starts).map(|i| solve_start(opts, constraints, coeffs, i)).collect();
    Ok(merge(outcomes))
}

/// Alternating-sign domain layout of a design.
#[derive(Debug, Clone, PartialEq)]
pub struct PolingPattern {
    /// `Δk_mat`, rad/m.
    pub base_mismatch: f64,
    /// Start position of every domain, m; the first is 0.
    pub domain_walls: Vec<f64>,
    /// `±1` per domain, strictly alternating.
    pub domain_signs: Vec<i8>,
    /// Index of the first domain of each segment.
    pub segment_first_domain: Vec<usize>,
    pub total_length: f64,
}

impl PolingPattern {
    pub fn domain_width(&self, i: usize) -> f64 {
        let end = self.domain_walls.get(i + 1).copied().unwrap_or(self.total_length);
        end - self.domain_walls[i]
    }

    /// Recover `(Δk_j, L_j)` per segment from the domain widths.
    pub fn recovered_segments(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::with_capacity(self.segment_first_domain.len());
        for (j, &first) in self.segment_first_domain.iter().enumerate() {
            let end = self.segment_first_domain.get(j + 1).copied().unwrap_or(self.domain_walls.len());
            let seg_end = self.domain_walls.get(end).copied().unwrap_or(self.total_length);
            let length = seg_end - self.domain_walls[first];
            // the last domain absorbs the remainder, so the first one carries Λ/2
            let half = if end - first > 1 { self.domain_width(first) } else { length };
            out.push((self.base_mismatch - PI / half, length));
        }
        out
    }
}

/// Lay out domains of width `Λ_j/2`, `Λ_j = 2π/(Δk_mat - Δk_j)`, segment by
/// segment. Each segment holds a whole number of half periods with the
/// remainder added to its last domain; signs keep alternating across
/// segment boundaries.
pub fn poling_pattern(design: &Design, delta_k_material: f64, min_domain_width: f64) -> Result<PolingPattern> {
    design.validate()?;
    if !(min_domain_width >= 0.0) {
        return Err(Error::InvalidArgument("min_domain_width must be non-negative".into()));
    }
    let mut walls = Vec::new();
    let mut signs = Vec::new();
    let mut firsts = Vec::with_capacity(design.segments.len());
    let mut z0 = 0.0;
    let mut sign: i8 = 1;
    for (index, s) in design.segments.iter().enumerate() {
        let half = domain_half_period(s, index, delta_k_material, min_domain_width)?;
        let count = ((s.length / half) * (1.0 + 1e-12)).floor() as usize;
        if count == 0 {
            return Err(Error::Fabrication {
                index,
                reason: format!("segment length {:.4e} m is shorter than one domain {half:.4e} m", s.length),
            });
        }
        firsts.push(walls.len());
        for k in 0..count {
            walls.push(z0 + half * k as f64);
            signs.push(sign);
            sign = -sign;
        }
        z0 += s.length;
    }
    Ok(PolingPattern {
        base_mismatch: delta_k_material,
        domain_walls: walls,
        domain_signs: signs,
        segment_first_domain: firsts,
        total_length: z0,
    })
}
