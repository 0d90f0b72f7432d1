//! Linear maps from physical deviations to the common detuning error `ε`.
//!
//! Each axis gets one coefficient, calibrated so that a single phase-matched
//! segment of known length loses 10% of its pair rate at a measured deviation.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::physics::reference;
use crate::su11::propagate;
use crate::{Error, Result};

/// Physical deviation axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axis {
    /// Crystal temperature, °C.
    Temperature,
    /// Signal wavelength, nm.
    Wavelength,
    /// Signal emission angle, degrees.
    Angle,
    /// The detuning error itself, rad/m (coefficient 1).
    Epsilon,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::Temperature => "temperature",
            Axis::Wavelength => "wavelength",
            Axis::Angle => "angle",
            Axis::Epsilon => "epsilon",
        }
    }

    pub fn unit(self) -> &'static str {
        match self {
            Axis::Temperature => "degC",
            Axis::Wavelength => "nm",
            Axis::Angle => "deg",
            Axis::Epsilon => "rad/m",
        }
    }

    pub fn physical() -> [Axis; 3] {
        [Axis::Temperature, Axis::Wavelength, Axis::Angle]
    }
}

impl core::str::FromStr for Axis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "temperature" => Ok(Axis::Temperature),
            "wavelength" => Ok(Axis::Wavelength),
            "angle" => Ok(Axis::Angle),
            "epsilon" => Ok(Axis::Epsilon),
            other => Err(Error::InvalidArgument(format!("unknown axis `{other}`"))),
        }
    }
}

/// A measured 90% half-width of a phase-matched reference crystal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationDatum {
    pub crystal_length: f64,
    pub omega: f64,
    /// Half-width in the axis' physical unit.
    pub width_value: f64,
    pub axis: Axis,
}

impl CalibrationDatum {
    fn check(&self) -> Result<()> {
        if !(self.crystal_length > 0.0) || !(self.width_value > 0.0) || !(self.omega >= 0.0) {
            return Err(Error::Calibration(format!(
                "crystal_length and width_value must be positive (got {} m, {})",
                self.crystal_length, self.width_value
            )));
        }
        if self.axis == Axis::Epsilon {
            return Err(Error::Calibration("the epsilon axis needs no calibration".into()));
        }
        Ok(())
    }
}

/// Per-axis `dΔk/d(deviation)` coefficients.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SensitivityCoefficients {
    /// rad/(m·°C)
    pub dk_dt: Option<f64>,
    /// rad/(m·nm)
    pub dk_dlambda: Option<f64>,
    /// rad/(m·degree)
    pub dk_dtheta: Option<f64>,
    pub references: Vec<CalibrationDatum>,
}

impl SensitivityCoefficients {
    /// Calibrate every axis from the given data; later data override earlier
    /// data for the same axis.
    pub fn from_data(data: &[CalibrationDatum]) -> Result<Self> {
        let mut c = SensitivityCoefficients::default();
        for d in data {
            let k = calibrate(d)?;
            match d.axis {
                Axis::Temperature => c.dk_dt = Some(k),
                Axis::Wavelength => c.dk_dlambda = Some(k),
                Axis::Angle => c.dk_dtheta = Some(k),
                Axis::Epsilon => unreachable!("rejected by calibrate"),
            }
            c.references.push(*d);
        }
        Ok(c)
    }

    /// The 20 mm periodically poled KTP reference: 0.445 °C, 10.64 nm and
    /// 0.227° half-widths at the reference pump coupling.
    pub fn reference() -> Self {
        let omega = reference::omega();
        let length = reference::CRYSTAL_LENGTH_M;
        let data = vec![
            CalibrationDatum { crystal_length: length, omega, width_value: reference::TEMPERATURE_HALF_WIDTH_C, axis: Axis::Temperature },
            CalibrationDatum { crystal_length: length, omega, width_value: reference::WAVELENGTH_HALF_WIDTH_NM, axis: Axis::Wavelength },
            CalibrationDatum { crystal_length: length, omega, width_value: reference::ANGLE_HALF_WIDTH_DEG, axis: Axis::Angle },
        ];
        SensitivityCoefficients::from_data(&data).expect("reference calibration brackets its root")
    }

    pub fn coefficient(&self, axis: Axis) -> Result<f64> {
        let c = match axis {
            Axis::Temperature => self.dk_dt,
            Axis::Wavelength => self.dk_dlambda,
            Axis::Angle => self.dk_dtheta,
            Axis::Epsilon => Some(1.0),
        };
        match c {
            Some(v) if v.is_finite() => Ok(v),
            _ => Err(Error::Uncalibrated(axis.name())),
        }
    }
}

/// Half-width `ε₉₀ > 0` at which a phase-matched segment of the given length
/// and coupling falls to 90% of its peak pair number.
pub fn width90_epsilon(crystal_length: f64, omega: f64) -> Result<f64> {
    if !(crystal_length > 0.0) || !(omega > 0.0) {
        return Err(Error::Calibration(format!(
            "crystal length and omega must be positive (got {crystal_length}, {omega})"
        )));
    }
    let peak = propagate(omega, 0.0, crystal_length).pair_mean();
    let excess = |eps: f64| propagate(omega, eps, crystal_length).pair_mean() / peak - 0.9;
    let mut lo = 0.0;
    let mut hi = 1.0 / crystal_length;
    let mut expansions = 0;
    while excess(hi) > 0.0 {
        lo = hi;
        hi *= 2.0;
        expansions += 1;
        if expansions > 60 {
            return Err(Error::Calibration("no 90% crossing found".into()));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if excess(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Coefficient in rad/m per physical unit for the datum's axis.
pub fn calibrate(datum: &CalibrationDatum) -> Result<f64> {
    datum.check()?;
    Ok(width90_epsilon(datum.crystal_length, datum.omega)? / datum.width_value)
}

/// `ε = coefficient × deviation`.
pub fn epsilon_from(coeffs: &SensitivityCoefficients, axis: Axis, deviation: f64) -> Result<f64> {
    Ok(coeffs.coefficient(axis)? * deviation)
}
