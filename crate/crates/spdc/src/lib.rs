//! File formats, tables and the parallel search behind the `spdc` tool.

pub mod error;
pub mod file;
pub mod poling;
pub mod search;
pub mod table;

pub use error::CliError;
pub use file::{ConstraintsFile, DesignFile, LoadedDesign};

use spdc_core::designer::DesignConstraints;
use spdc_core::physics::reference;
use spdc_core::robustness::RobustnessSpec;

/// Search setup mirroring the 20 mm, 60 mW reference crystal.
pub fn reference_constraints() -> ConstraintsFile {
    let constraints = DesignConstraints {
        min_domain_width: 2.0e-6,
        efficiency_floor: 0.1,
        flatness: RobustnessSpec { work_temperature: reference::WORK_TEMPERATURE_C, ..RobustnessSpec::default() },
        max_total_length: 0.0205,
        delta_k_material: Some(reference::delta_k_material()),
    };
    ConstraintsFile {
        schema_version: file::SCHEMA_VERSION,
        constraints: (&constraints).into(),
        target_total_length_m: Some(reference::CRYSTAL_LENGTH_M),
        sensitivity: None,
    }
}
