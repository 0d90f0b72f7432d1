//! Two-column poling text: wall position in meters and domain sign.

use std::fmt::Write;

use spdc_core::designer::PolingPattern;

use crate::table::fmt12;

pub fn write_pattern(pattern: &PolingPattern, design_name: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# poling pattern for {design_name}");
    let _ = writeln!(out, "# delta_k_material_rad_per_m {}", fmt12(pattern.base_mismatch));
    let _ = writeln!(out, "# total_length_m {}", fmt12(pattern.total_length));
    let _ = writeln!(out, "# domains {}", pattern.domain_walls.len());
    out.push_str("# wall_position_m sign\n");
    for (z, s) in pattern.domain_walls.iter().zip(&pattern.domain_signs) {
        let _ = writeln!(out, "{} {:+}", fmt12(*z), s);
    }
    out
}

/// Read back `(wall_position, sign)` pairs, skipping `#` lines.
pub fn parse_pattern(text: &str) -> Result<Vec<(f64, i8)>, String> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.starts_with('#') && !l.trim().is_empty())
        .map(|(i, l)| {
            let mut cols = l.split_whitespace();
            let z = cols.next().and_then(|c| c.parse().ok()).ok_or(format!("line {}: bad position", i + 1))?;
            let s = cols.next().and_then(|c| c.parse().ok()).ok_or(format!("line {}: bad sign", i + 1))?;
            Ok((z, s))
        })
        .collect()
}
