//! Nonlinear coupling strength from material and pump parameters.

use core::f64::consts::PI;

use alloc::format;
#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result};

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// Vacuum permittivity, F/m.
pub const EPSILON_0: f64 = 8.854_187_8128e-12;

/// Material and field parameters of a three-wave mixing process.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PumpPhysics {
    /// Effective second-order susceptibility, m/V.
    pub chi2: f64,
    pub n_s: f64,
    pub n_i: f64,
    pub n_p: f64,
    /// Angular frequencies, rad/s.
    pub omega_s: f64,
    pub omega_i: f64,
    pub omega_p: f64,
    /// Pump amplitude `A_p` in normalized units.
    pub pump_amplitude: f64,
}

impl PumpPhysics {
    pub fn validate(&self) -> Result<()> {
        let positive = [("n_s", self.n_s), ("n_i", self.n_i), ("n_p", self.n_p), ("omega_s", self.omega_s), ("omega_i", self.omega_i), ("omega_p", self.omega_p)];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidArgument(format!("{name} must be positive, got {v}")));
            }
        }
        if !self.chi2.is_finite() || !self.pump_amplitude.is_finite() {
            return Err(Error::InvalidArgument("chi2 and pump_amplitude must be finite".into()));
        }
        let sum = self.omega_s + self.omega_i;
        if (self.omega_p - sum).abs() > 1e-9 * self.omega_p {
            return Err(Error::InvalidArgument(format!(
                "energy conservation violated: omega_p = {} but omega_s + omega_i = {sum}",
                self.omega_p
            )));
        }
        Ok(())
    }

    /// `Ω = |A_p κ|`.
    pub fn omega(&self) -> Result<f64> {
        Ok((self.pump_amplitude * compute_kappa(self)?).abs())
    }
}

/// First-order quasi-phase-matched coupling coefficient
/// `κ = -(2χ⁽²⁾/(πħc)) √(ω_s ω_i ω_p / (n_s n_i n_p))`.
pub fn compute_kappa(physics: &PumpPhysics) -> Result<f64> {
    physics.validate()?;
    let root = (physics.omega_s * physics.omega_i * physics.omega_p / (physics.n_s * physics.n_i * physics.n_p)).sqrt();
    Ok(-2.0 * physics.chi2 / (PI * HBAR * SPEED_OF_LIGHT) * root)
}

/// Plane-wave small-signal parametric gain coefficient, rad/m:
/// `Γ = √(2 ω_s ω_i d_eff² I_p / (n_s n_i n_p ε₀ c³))` with `I_p = P/(π w₀²)`.
///
/// Used as `Ω` for a pump of `power` watts focused to waist `waist` metres.
#[allow(clippy::too_many_arguments)]
pub fn plane_wave_coupling(power: f64, waist: f64, d_eff: f64, n_s: f64, n_i: f64, n_p: f64, lambda_s: f64, lambda_i: f64) -> Result<f64> {
    for (name, v) in [("power", power), ("waist", waist), ("n_s", n_s), ("n_i", n_i), ("n_p", n_p), ("lambda_s", lambda_s), ("lambda_i", lambda_i)] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::InvalidArgument(format!("{name} must be positive, got {v}")));
        }
    }
    let intensity = power / (PI * waist * waist);
    let w_s = 2.0 * PI * SPEED_OF_LIGHT / lambda_s;
    let w_i = 2.0 * PI * SPEED_OF_LIGHT / lambda_i;
    let c3 = SPEED_OF_LIGHT * SPEED_OF_LIGHT * SPEED_OF_LIGHT;
    Ok((2.0 * w_s * w_i * d_eff * d_eff * intensity / (n_s * n_i * n_p * EPSILON_0 * c3)).sqrt())
}

/// Reference setup: type-0 degenerate 532 nm → 1064 nm in periodically
/// poled KTP, 60 mW pump, 40 µm waist, 20 mm crystal at 37 °C.
pub mod reference {
    /// KTP `d33`, m/V.
    pub const D33: f64 = 16.9e-12;
    /// First-order QPM effective nonlinearity `2 d33 / π`, m/V.
    pub const D_EFF: f64 = 2.0 * D33 / core::f64::consts::PI;
    /// `n_z` of KTP at 1064 nm.
    pub const N_SIGNAL: f64 = 1.8302;
    /// `n_z` of KTP at 532 nm.
    pub const N_PUMP: f64 = 1.8891;
    pub const PUMP_POWER_W: f64 = 0.060;
    pub const PUMP_WAIST_M: f64 = 40e-6;
    pub const SIGNAL_WAVELENGTH_M: f64 = 1064e-9;
    pub const CRYSTAL_LENGTH_M: f64 = 0.020;
    pub const WORK_TEMPERATURE_C: f64 = 37.0;
    /// First-order poling period for 532 → 1064 nm in KTP, m.
    pub const POLING_PERIOD_M: f64 = 9.0e-6;

    /// Half-width deviations at which the 20 mm reference drops to 90%.
    pub const TEMPERATURE_HALF_WIDTH_C: f64 = 0.445;
    pub const WAVELENGTH_HALF_WIDTH_NM: f64 = 10.64;
    pub const ANGLE_HALF_WIDTH_DEG: f64 = 0.227;

    /// `Ω` of the reference setup, rad/m.
    pub fn omega() -> f64 {
        super::plane_wave_coupling(PUMP_POWER_W, PUMP_WAIST_M, D_EFF, N_SIGNAL, N_SIGNAL, N_PUMP, SIGNAL_WAVELENGTH_M, SIGNAL_WAVELENGTH_M)
            .expect("reference constants are positive")
    }

    /// Material mismatch compensated by the reference poling, rad/m.
    pub fn delta_k_material() -> f64 {
        2.0 * core::f64::consts::PI / POLING_PERIOD_M
    }
}
