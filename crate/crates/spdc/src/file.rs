//! JSON design files, schema version 1.
//!
//! Field names carry their SI unit. Files reserialize byte-for-byte through
//! [`DesignFile::to_canonical_string`].

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use spdc_core::designer::DesignConstraints;
use spdc_core::physics::PumpPhysics;
use spdc_core::robustness::RobustnessSpec;
use spdc_core::sensitivity::{Axis, CalibrationDatum, SensitivityCoefficients};
use spdc_core::{Design, Segment};

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentRecord {
    pub omega_rad_per_m: f64,
    pub delta_k_rad_per_m: f64,
    pub length_m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignRecord {
    pub name: String,
    pub work_temperature_c: f64,
    #[serde(default)]
    pub metadata: BTreeMap<String, String>,
    pub segments: Vec<SegmentRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalibrationRecord {
    pub axis: String,
    pub crystal_length_m: f64,
    pub omega_rad_per_m: f64,
    /// In the axis unit: °C, nm or degrees.
    pub width_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SensitivityRecord {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dk_dt_rad_per_m_per_c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dk_dlambda_rad_per_m_per_nm: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dk_dtheta_rad_per_m_per_deg: Option<f64>,
    #[serde(default)]
    pub calibration: Vec<CalibrationRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PumpRecord {
    pub chi2_m_per_v: f64,
    pub n_s: f64,
    pub n_i: f64,
    pub n_p: f64,
    pub omega_s_rad_per_s: f64,
    pub omega_i_rad_per_s: f64,
    pub omega_p_rad_per_s: f64,
    pub pump_amplitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlatnessRecord {
    pub work_temperature_c: f64,
    pub half_window_c: f64,
    pub order: usize,
    pub flatness_threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintsRecord {
    pub min_domain_width_m: f64,
    pub efficiency_floor: f64,
    pub max_total_length_m: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_k_material_rad_per_m: Option<f64>,
    pub flatness: FlatnessRecord,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignFile {
    pub schema_version: u32,
    pub design: DesignRecord,
    pub sensitivity: SensitivityRecord,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pump: Option<PumpRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constraints: Option<ConstraintsRecord>,
}

/// Search configuration read by `spdc design --constraints`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintsFile {
    pub schema_version: u32,
    pub constraints: ConstraintsRecord,
    /// Total length the search steers toward.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_total_length_m: Option<f64>,
    /// Defaults to the reference calibration.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sensitivity: Option<SensitivityRecord>,
}

fn positive(field: &str, v: f64) -> Result<(), String> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(format!("{field} must be positive and finite, got {v}"))
    }
}

fn finite(field: &str, v: f64) -> Result<(), String> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(format!("{field} must be finite, got {v}"))
    }
}

impl From<&Design> for DesignRecord {
    fn from(d: &Design) -> Self {
        DesignRecord {
            name: d.name.clone(),
            work_temperature_c: d.work_temperature,
            metadata: d.metadata.clone(),
            segments: d
                .segments
                .iter()
                .map(|s| SegmentRecord { omega_rad_per_m: s.omega, delta_k_rad_per_m: s.delta_k, length_m: s.length })
                .collect(),
        }
    }
}

impl DesignRecord {
    pub fn to_design(&self) -> Result<Design, String> {
        if self.segments.is_empty() {
            return Err("design.segments must hold at least one segment".into());
        }
        finite("design.work_temperature_c", self.work_temperature_c)?;
        let mut segments = Vec::with_capacity(self.segments.len());
        for (i, s) in self.segments.iter().enumerate() {
            positive(&format!("design.segments[{i}].length_m"), s.length_m)?;
            finite(&format!("design.segments[{i}].delta_k_rad_per_m"), s.delta_k_rad_per_m)?;
            if !(s.omega_rad_per_m >= 0.0) || !s.omega_rad_per_m.is_finite() {
                return Err(format!("design.segments[{i}].omega_rad_per_m must be non-negative, got {}", s.omega_rad_per_m));
            }
            segments.push(Segment::new(s.omega_rad_per_m, s.delta_k_rad_per_m, s.length_m).map_err(|e| e.to_string())?);
        }
        let mut d = Design::new(self.name.clone(), segments, self.work_temperature_c).map_err(|e| e.to_string())?;
        d.metadata = self.metadata.clone();
        Ok(d)
    }
}

impl From<&SensitivityCoefficients> for SensitivityRecord {
    fn from(c: &SensitivityCoefficients) -> Self {
        SensitivityRecord {
            dk_dt_rad_per_m_per_c: c.dk_dt,
            dk_dlambda_rad_per_m_per_nm: c.dk_dlambda,
            dk_dtheta_rad_per_m_per_deg: c.dk_dtheta,
            calibration: c
                .references
                .iter()
                .map(|d| CalibrationRecord {
                    axis: d.axis.name().into(),
                    crystal_length_m: d.crystal_length,
                    omega_rad_per_m: d.omega,
                    width_value: d.width_value,
                })
                .collect(),
        }
    }
}

impl SensitivityRecord {
    pub fn to_coefficients(&self) -> Result<SensitivityCoefficients, String> {
        let fields = [
            ("sensitivity.dk_dt_rad_per_m_per_c", self.dk_dt_rad_per_m_per_c),
            ("sensitivity.dk_dlambda_rad_per_m_per_nm", self.dk_dlambda_rad_per_m_per_nm),
            ("sensitivity.dk_dtheta_rad_per_m_per_deg", self.dk_dtheta_rad_per_m_per_deg),
        ];
        for (name, v) in fields {
            if let Some(v) = v {
                finite(name, v)?;
                if v == 0.0 {
                    return Err(format!("{name} must be non-zero"));
                }
            }
        }
        let mut references = Vec::with_capacity(self.calibration.len());
        for (i, r) in self.calibration.iter().enumerate() {
            let axis: Axis = r.axis.parse().map_err(|_| format!("sensitivity.calibration[{i}].axis: unknown axis `{}`", r.axis))?;
            positive(&format!("sensitivity.calibration[{i}].crystal_length_m"), r.crystal_length_m)?;
            positive(&format!("sensitivity.calibration[{i}].width_value"), r.width_value)?;
            references.push(CalibrationDatum { crystal_length: r.crystal_length_m, omega: r.omega_rad_per_m, width_value: r.width_value, axis });
        }
        Ok(SensitivityCoefficients {
            dk_dt: self.dk_dt_rad_per_m_per_c,
            dk_dlambda: self.dk_dlambda_rad_per_m_per_nm,
            dk_dtheta: self.dk_dtheta_rad_per_m_per_deg,
            references,
        })
    }

    /// JSON field holding the coefficient of an axis.
    pub fn field_name(axis: Axis) -> &'static str {
        match axis {
            Axis::Temperature => "sensitivity.dk_dt_rad_per_m_per_c",
            Axis::Wavelength => "sensitivity.dk_dlambda_rad_per_m_per_nm",
            Axis::Angle => "sensitivity.dk_dtheta_rad_per_m_per_deg",
            Axis::Epsilon => "epsilon",
        }
    }
}

impl From<&PumpPhysics> for PumpRecord {
    fn from(p: &PumpPhysics) -> Self {
        PumpRecord {
            chi2_m_per_v: p.chi2,
            n_s: p.n_s,
            n_i: p.n_i,
            n_p: p.n_p,
            omega_s_rad_per_s: p.omega_s,
            omega_i_rad_per_s: p.omega_i,
            omega_p_rad_per_s: p.omega_p,
            pump_amplitude: p.pump_amplitude,
        }
    }
}

impl PumpRecord {
    pub fn to_physics(&self) -> Result<PumpPhysics, String> {
        let p = PumpPhysics {
            chi2: self.chi2_m_per_v,
            n_s: self.n_s,
            n_i: self.n_i,
            n_p: self.n_p,
            omega_s: self.omega_s_rad_per_s,
            omega_i: self.omega_i_rad_per_s,
            omega_p: self.omega_p_rad_per_s,
            pump_amplitude: self.pump_amplitude,
        };
        p.validate().map_err(|e| format!("pump: {e}"))?;
        Ok(p)
    }
}

impl From<&DesignConstraints> for ConstraintsRecord {
    fn from(c: &DesignConstraints) -> Self {
        ConstraintsRecord {
            min_domain_width_m: c.min_domain_width,
            efficiency_floor: c.efficiency_floor,
            max_total_length_m: c.max_total_length,
            delta_k_material_rad_per_m: c.delta_k_material,
            flatness: FlatnessRecord {
                work_temperature_c: c.flatness.work_temperature,
                half_window_c: c.flatness.half_window,
                order: c.flatness.order,
                flatness_threshold: c.flatness.flatness_threshold,
            },
        }
    }
}

impl ConstraintsRecord {
    pub fn to_constraints(&self) -> Result<DesignConstraints, String> {
        positive("constraints.min_domain_width_m", self.min_domain_width_m)?;
        positive("constraints.max_total_length_m", self.max_total_length_m)?;
        finite("constraints.efficiency_floor", self.efficiency_floor)?;
        positive("constraints.flatness.half_window_c", self.flatness.half_window_c)?;
        positive("constraints.flatness.flatness_threshold", self.flatness.flatness_threshold)?;
        finite("constraints.flatness.work_temperature_c", self.flatness.work_temperature_c)?;
        if !(1..=4).contains(&self.flatness.order) {
            return Err(format!("constraints.flatness.order must be in 1..=4, got {}", self.flatness.order));
        }
        if let Some(v) = self.delta_k_material_rad_per_m {
            finite("constraints.delta_k_material_rad_per_m", v)?;
        }
        Ok(DesignConstraints {
            min_domain_width: self.min_domain_width_m,
            efficiency_floor: self.efficiency_floor,
            max_total_length: self.max_total_length_m,
            delta_k_material: self.delta_k_material_rad_per_m,
            flatness: RobustnessSpec {
                work_temperature: self.flatness.work_temperature_c,
                half_window: self.flatness.half_window_c,
                order: self.flatness.order,
                flatness_threshold: self.flatness.flatness_threshold,
            },
        })
    }
}

/// A design file decoded into library types.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedDesign {
    pub design: Design,
    pub sensitivity: SensitivityCoefficients,
    pub pump: Option<PumpPhysics>,
    pub constraints: Option<DesignConstraints>,
}

impl DesignFile {
    pub fn new(design: &Design, sensitivity: &SensitivityCoefficients) -> Self {
        DesignFile {
            schema_version: SCHEMA_VERSION,
            design: design.into(),
            sensitivity: sensitivity.into(),
            pump: None,
            constraints: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, String> {
        let file: DesignFile = serde_json::from_str(text).map_err(|e| e.to_string())?;
        if file.schema_version != SCHEMA_VERSION {
            return Err(format!("schema_version must be {SCHEMA_VERSION}, got {}", file.schema_version));
        }
        Ok(file)
    }

    /// Pretty JSON with a trailing newline.
    pub fn to_canonical_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("design files always serialize");
        s.push('\n');
        s
    }

    pub fn decode(&self) -> Result<LoadedDesign, String> {
        Ok(LoadedDesign {
            design: self.design.to_design()?,
            sensitivity: self.sensitivity.to_coefficients()?,
            pump: self.pump.as_ref().map(PumpRecord::to_physics).transpose()?,
            constraints: self.constraints.as_ref().map(ConstraintsRecord::to_constraints).transpose()?,
        })
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::input(path.display().to_string(), e.to_string()))?;
        DesignFile::from_json(&text).map_err(|e| CliError::input(path.display().to_string(), e))
    }

    pub fn load(path: &Path) -> Result<(Self, LoadedDesign), CliError> {
        let file = DesignFile::read(path)?;
        let loaded = file.decode().map_err(|e| CliError::input(path.display().to_string(), e))?;
        Ok((file, loaded))
    }
}

impl ConstraintsFile {
    pub fn from_json(text: &str) -> Result<Self, String> {
        let file: ConstraintsFile = serde_json::from_str(text).map_err(|e| e.to_string())?;
        if file.schema_version != SCHEMA_VERSION {
            return Err(format!("schema_version must be {SCHEMA_VERSION}, got {}", file.schema_version));
        }
        file.constraints.to_constraints()?;
        if let Some(t) = file.target_total_length_m {
            positive("target_total_length_m", t)?;
        }
        if let Some(s) = &file.sensitivity {
            s.to_coefficients()?;
        }
        Ok(file)
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::input(path.display().to_string(), e.to_string()))?;
        ConstraintsFile::from_json(&text).map_err(|e| CliError::input(path.display().to_string(), e))
    }

    pub fn to_canonical_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("constraint files always serialize");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> DesignFile {
        let mut d = Design::new(
            "two",
            vec![Segment::new(2.0, 1500.0, 0.003).unwrap(), Segment::new(2.0, -1500.0, 0.003).unwrap()],
            37.0,
        )
        .unwrap();
        d.metadata.insert("origin".into(), "test".into());
        DesignFile::new(&d, &SensitivityCoefficients { dk_dt: Some(124.5), ..Default::default() })
    }

    #[test]
    fn canonical_round_trip() {
        let text = sample().to_canonical_string();
        let again = DesignFile::from_json(&text).unwrap();
        assert_eq!(again.to_canonical_string(), text);
        let loaded = again.decode().unwrap();
        assert_eq!(loaded.design.segments[1].delta_k, -1500.0);
        assert_eq!(loaded.sensitivity.dk_dt, Some(124.5));
        assert_eq!(loaded.sensitivity.dk_dlambda, None);
    }

    #[test]
    fn invalid_fields_are_named() {
        let mut f = sample();
        f.design.segments[1].length_m = -1.0;
        let err = f.decode().unwrap_err();
        assert!(err.contains("design.segments[1].length_m"), "{err}");

        let text = sample().to_canonical_string().replace("\"length_m\"", "\"length_mm\"");
        let err = DesignFile::from_json(&text).unwrap_err();
        assert!(err.contains("length_m"), "{err}");

        let text = sample().to_canonical_string().replace("\"schema_version\": 1", "\"schema_version\": 2");
        assert!(DesignFile::from_json(&text).unwrap_err().contains("schema_version"));
    }

    #[test]
    fn sensitivity_round_trip() {
        let c = SensitivityCoefficients::reference();
        let back = SensitivityRecord::from(&c).to_coefficients().unwrap();
        assert_eq!(back, c);
    }
}
