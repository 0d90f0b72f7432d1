//! Undepleted-pump SU(1,1) propagation through crystal segments.
//!
//! Under a constant pump the signal and conjugated idler amplitudes evolve as
//!
//! ```text
//! d/dz (A_s, A_i*) = [[0, -i Ω e^{-iΦ(z)}], [i Ω e^{iΦ(z)}, 0]] (A_s, A_i*)
//! ```
//!
//! with `dΦ/dz = Δk`. For a segment of constant `Ω`, `Δk` and length `z` the
//! propagator is `[[α, β], [β*, α*]]` with
//!
//! ```text
//! α = e^{-iΔk z/2} (cosh(gz) + i Δk/(2g) sinh(gz))
//! β = -i e^{-iΔk z/2} (Ω/g) sinh(gz),      g² = Ω² - (Δk/2)²
//! ```
//!
//! We never take the square root of a negative `g²`: writing `s = g²z²`,
//! `C = cosh √s` and `S = sinh √s / √s` are entire functions of `s`, and
//! `α = e^{-iθ}(C + iθS)`, `β = -i e^{-iθ} Ωz S` with `θ = Δk z/2`.
//!
//! In a segmented crystal the mismatch phase `Φ` is continuous across segment
//! boundaries, so segment `j` starts with the accumulated phase
//! `Φ_j = Σ_{k<j} (Δk_k + ε) l_k` and its `β` picks up a factor `e^{-iΦ_j}`.
//! Every segment shares the same detuning error `ε`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::jet::{CJet, Jet};
use crate::{Complex, Error, Result};

/// One crystal slab with constant coupling and phase mismatch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    /// Coupling strength `Ω`, rad/m.
    pub omega: f64,
    /// Phase mismatch `Δk`, rad/m.
    pub delta_k: f64,
    /// Length, m.
    pub length: f64,
}

impl Segment {
    pub fn new(omega: f64, delta_k: f64, length: f64) -> Result<Self> {
        let s = Segment { omega, delta_k, length };
        s.check(0)?;
        Ok(s)
    }

    pub(crate) fn check(&self, index: usize) -> Result<()> {
        let bad = |reason: String| Err(Error::InvalidSegment { index, reason });
        if !(self.length > 0.0) || !self.length.is_finite() {
            return bad(format!("length must be positive and finite, got {}", self.length));
        }
        if !(self.omega >= 0.0) || !self.omega.is_finite() {
            return bad(format!("omega must be non-negative and finite, got {}", self.omega));
        }
        if !self.delta_k.is_finite() {
            return bad(format!("delta_k must be finite, got {}", self.delta_k));
        }
        Ok(())
    }

    /// `g² = Ω² - ((Δk + ε)/2)²`.
    pub fn g_squared(&self, epsilon: f64) -> f64 {
        let half = 0.5 * (self.delta_k + epsilon);
        self.omega * self.omega - half * half
    }

    pub fn regime(&self, epsilon: f64) -> Regime {
        let g2 = self.g_squared(epsilon);
        if g2 > 0.0 {
            Regime::Hyperbolic
        } else if g2 < 0.0 {
            Regime::Harmonic
        } else {
            Regime::Critical
        }
    }
}

/// Dynamical regime of a segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// `Ω² > (Δk/2)²`: exponential growth.
    Hyperbolic,
    /// `Ω² < (Δk/2)²`: oscillatory pair number.
    Harmonic,
    /// `Ω² = (Δk/2)²`: polynomial growth.
    Critical,
}

/// The `(α, β)` entries of an SU(1,1) propagator `[[α, β], [β*, α*]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Su11Matrix {
    pub alpha: Complex,
    pub beta: Complex,
}

impl Su11Matrix {
    pub fn identity() -> Self {
        Su11Matrix { alpha: Complex::new(1.0, 0.0), beta: Complex::new(0.0, 0.0) }
    }

    /// Matrix product `self · rhs` (apply `rhs` first).
    pub fn mul(&self, rhs: &Su11Matrix) -> Su11Matrix {
        Su11Matrix {
            alpha: self.alpha * rhs.alpha + self.beta * rhs.beta.conj(),
            beta: self.alpha * rhs.beta + self.beta * rhs.alpha.conj(),
        }
    }

    /// Group inverse `[[α*, -β], [-β*, α]]`.
    pub fn inverse(&self) -> Su11Matrix {
        Su11Matrix { alpha: self.alpha.conj(), beta: -self.beta }
    }

    /// `| |α|² - |β|² - 1 |`.
    pub fn pseudo_unitarity_defect(&self) -> f64 {
        (self.alpha.norm_sqr() - self.beta.norm_sqr() - 1.0).abs()
    }

    /// Re-reference to a pump-relative phase `phi`: `β → β e^{-i phi}`.
    pub fn phase_shifted(&self, phi: f64) -> Su11Matrix {
        Su11Matrix { alpha: self.alpha, beta: self.beta * Complex::from_polar(1.0, -phi) }
    }

    /// Mean pair number `μ = |β|²`.
    pub fn pair_mean(&self) -> f64 {
        self.beta.norm_sqr()
    }
}

/// `(cosh √s, sinh √s / √s)` for real `s`, continued to `s < 0`.
pub(crate) fn cosh_sinhc(s: f64) -> (f64, f64) {
    if s.abs() < 1e-12 {
        (1.0 + 0.5 * s, 1.0 + s / 6.0)
    } else if s > 0.0 {
        let r = s.sqrt();
        (r.cosh(), r.sinh() / r)
    } else {
        let r = (-s).sqrt();
        (r.cos(), r.sin() / r)
    }
}

/// Jet version of [`cosh_sinhc`].
fn cosh_sinhc_jet(s: Jet) -> (Jet, Jet) {
    let s0 = s.value();
    if s0.abs() < 0.5 {
        // Σ s^k/(2k)!, Σ s^k/(2k+1)!; 14 terms reach 1e-22 at |s| = 0.5
        const TERMS: usize = 14;
        let mut c_coef = [0.0; TERMS];
        let mut s_coef = [0.0; TERMS];
        let mut fact = 1.0;
        for k in 0..TERMS {
            if k > 0 {
                fact *= (2 * k) as f64;
            }
            c_coef[k] = 1.0 / fact;
            fact *= (2 * k + 1) as f64;
            s_coef[k] = 1.0 / fact;
        }
        let horner = |coef: &[f64]| {
            coef.iter().rev().fold(Jet::constant(0.0), |acc, &c| (acc * s).add_const(c))
        };
        (horner(&c_coef), horner(&s_coef))
    } else if s0 > 0.0 {
        let r = s.sqrt();
        let (sh, ch) = r.sinh_cosh();
        (ch, sh.div(r))
    } else {
        let r = (-s).sqrt();
        let (sn, cs) = r.sin_cos();
        (cs, sn.div(r))
    }
}

/// Propagator of constant `(Ω, Δk')` over `z`, starting from zero phase.
pub(crate) fn propagate(omega: f64, delta_k: f64, z: f64) -> Su11Matrix {
    let half = 0.5 * delta_k;
    let s = (omega * omega - half * half) * z * z;
    let (c, sc) = cosh_sinhc(s);
    let theta = half * z;
    let phase = Complex::from_polar(1.0, -theta);
    Su11Matrix {
        alpha: phase * Complex::new(c, theta * sc),
        beta: phase * Complex::new(0.0, -omega * z * sc),
    }
}

/// Closed-form propagator of one segment with the common detuning error
/// `epsilon` added to its phase mismatch.
pub fn segment_matrix(segment: &Segment, epsilon: f64) -> Result<Su11Matrix> {
    segment.check(0)?;
    Ok(propagate(segment.omega, segment.delta_k + epsilon, segment.length))
}

/// Product `M_N ⋯ M_2 M_1` of matrices listed in propagation order.
pub fn compose(matrices: &[Su11Matrix]) -> Result<Su11Matrix> {
    let (first, rest) = matrices
        .split_first()
        .ok_or_else(|| Error::InvalidArgument("cannot compose an empty list".into()))?;
    Ok(rest.iter().fold(*first, |acc, m| m.mul(&acc)))
}

/// An ordered stack of segments, the unit of simulation and design.
#[derive(Debug, Clone, PartialEq)]
pub struct Design {
    pub segments: Vec<Segment>,
    pub name: String,
    /// Working temperature `T_p`, °C.
    pub work_temperature: f64,
    pub metadata: BTreeMap<String, String>,
}

impl Design {
    pub fn new(name: impl Into<String>, segments: Vec<Segment>, work_temperature: f64) -> Result<Self> {
        let d = Design { segments, name: name.into(), work_temperature, metadata: BTreeMap::new() };
        d.validate()?;
        Ok(d)
    }

    /// A single phase-matched segment: the periodically poled reference.
    pub fn periodically_poled(length: f64, omega: f64, work_temperature: f64) -> Result<Self> {
        Design::new("periodically-poled", alloc::vec![Segment::new(omega, 0.0, length)?], work_temperature)
    }

    pub fn validate(&self) -> Result<()> {
        if self.segments.is_empty() {
            return Err(Error::InvalidArgument("a design needs at least one segment".into()));
        }
        for (i, s) in self.segments.iter().enumerate() {
            s.check(i)?;
        }
        Ok(())
    }

    pub fn total_length(&self) -> f64 {
        self.segments.iter().map(|s| s.length).sum()
    }

    /// Length-weighted mean coupling.
    pub fn mean_omega(&self) -> f64 {
        let weighted: f64 = self.segments.iter().map(|s| s.omega * s.length).sum();
        weighted / self.total_length()
    }
}

/// Composite propagator of a design at detuning error `epsilon`.
pub fn design_matrix(design: &Design, epsilon: f64) -> Result<Su11Matrix> {
    design.validate()?;
    let mut total = Su11Matrix::identity();
    let mut phi = 0.0;
    for s in &design.segments {
        let dk = s.delta_k + epsilon;
        total = propagate(s.omega, dk, s.length).phase_shifted(phi).mul(&total);
        phi += dk * s.length;
    }
    Ok(total)
}

/// `|β(ε)|²` of a design expanded as a Taylor jet around `epsilon`.
pub(crate) fn design_pair_mean_jet(design: &Design, epsilon: f64) -> Jet {
    let eps = Jet::variable(epsilon);
    let mut alpha = CJet::constant(1.0, 0.0);
    let mut beta = CJet::constant(0.0, 0.0);
    let mut phi = Jet::constant(0.0);
    for s in &design.segments {
        let dk = eps.add_const(s.delta_k);
        let theta = dk.scale(0.5 * s.length);
        let half = dk.scale(0.5);
        let g2z2 = (half * half).scale(-1.0).add_const(s.omega * s.omega).scale(s.length * s.length);
        let (c, sc) = cosh_sinhc_jet(g2z2);
        let phase = CJet::expi_neg(theta);
        let a = phase * CJet::new(c, theta * sc);
        let b = (phase * CJet::real(sc.scale(-s.omega * s.length)).mul_i()) * CJet::expi_neg(phi);
        // [[a, b], [b*, a*]] · [[alpha, beta], [beta*, alpha*]]
        let new_alpha = a * alpha + b * beta.conj();
        let new_beta = a * beta + b * alpha.conj();
        alpha = new_alpha;
        beta = new_beta;
        phi = phi + dk.scale(s.length);
    }
    beta.norm_sqr()
}

/// Point `(u, v, w)` on the hyperboloid `u² + v² - (w+1)² = -1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HyperboloidPoint {
    pub u: f64,
    pub v: f64,
    pub w: f64,
}

impl HyperboloidPoint {
    /// `| u² + v² - (w+1)² + 1 |`.
    pub fn defect(&self) -> f64 {
        let w1 = self.w + 1.0;
        (self.u * self.u + self.v * self.v - w1 * w1 + 1.0).abs()
    }
}

/// Hyperboloid coordinates: `w = 2|β|²`, `u + iv = 2 α β*`.
pub fn hyperboloid_point(m: &Su11Matrix) -> HyperboloidPoint {
    let uv = m.alpha * m.beta.conj() * 2.0;
    HyperboloidPoint { u: uv.re, v: uv.im, w: 2.0 * m.beta.norm_sqr() }
}

/// One sampled position along a design.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectorySample {
    /// Position from the crystal input, m.
    pub z: f64,
    pub matrix: Su11Matrix,
    pub mu: f64,
    pub point: HyperboloidPoint,
}

/// Cumulative propagator sampled `samples_per_segment` times inside every
/// segment (ending on each boundary), preceded by the input face `z = 0`.
pub fn trajectory(design: &Design, epsilon: f64, samples_per_segment: usize) -> Result<Vec<TrajectorySample>> {
    if samples_per_segment < 2 {
        return Err(Error::InvalidArgument(format!(
            "samples_per_segment must be at least 2, got {samples_per_segment}"
        )));
    }
    design.validate()?;
    let sample = |z: f64, m: Su11Matrix| TrajectorySample { z, matrix: m, mu: m.pair_mean(), point: hyperboloid_point(&m) };
    let mut out = Vec::with_capacity(design.segments.len() * samples_per_segment + 1);
    out.push(sample(0.0, Su11Matrix::identity()));
    let mut before = Su11Matrix::identity();
    let mut phi = 0.0;
    let mut z0 = 0.0;
    for s in &design.segments {
        let dk = s.delta_k + epsilon;
        for k in 1..=samples_per_segment {
            let dz = s.length * k as f64 / samples_per_segment as f64;
            let m = propagate(s.omega, dk, dz).phase_shifted(phi).mul(&before);
            out.push(sample(z0 + dz, m));
        }
        before = out.last().map(|t| t.matrix).unwrap_or(before);
        phi += dk * s.length;
        z0 += s.length;
    }
    Ok(out)
}
