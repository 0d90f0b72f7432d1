//! Regenerate the periodically poled reference design and the reference
//! constraint file: `cargo run -p spdc --example reference_files -- designs`.

use std::path::PathBuf;

use spdc::DesignFile;
use spdc_core::physics::reference;
use spdc_core::sensitivity::SensitivityCoefficients;
use spdc_core::Design;

fn main() -> std::io::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "designs".into()));
    std::fs::create_dir_all(&dir)?;

    let mut pp = Design::periodically_poled(reference::CRYSTAL_LENGTH_M, reference::omega(), reference::WORK_TEMPERATURE_C)
        .expect("reference constants are valid");
    pp.name = "pp-ktp-20mm".into();
    pp.metadata.insert("pump".into(), "60 mW, 40 um waist, 1064 nm degenerate".into());
    let file = DesignFile::new(&pp, &SensitivityCoefficients::reference());
    std::fs::write(dir.join("pp_20mm.json"), file.to_canonical_string())?;

    std::fs::write(dir.join("reference_constraints.json"), spdc::reference_constraints().to_canonical_string())?;
    Ok(())
}
