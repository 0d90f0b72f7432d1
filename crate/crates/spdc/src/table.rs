//! CSV tables at 12 significant digits.

use std::fmt::Write;

use spdc_core::robustness::SweepRow;
use spdc_core::stats::PhotonNumberDistribution;
use spdc_core::su11::TrajectorySample;

/// `v` in scientific notation with 12 significant digits.
pub fn fmt12(v: f64) -> String {
    format!("{v:.11e}")
}

fn normalizer(values: impl Iterator<Item = f64>) -> f64 {
    values.fold(0.0f64, f64::max)
}

fn normalized(v: f64, peak: f64) -> f64 {
    if peak > 0.0 {
        v / peak
    } else {
        0.0
    }
}

/// Columns `z_m,mu,mu_normalized,u,v,w`; normalization is by the largest `mu`
/// in the table.
pub fn trajectory_csv(samples: &[TrajectorySample]) -> String {
    let peak = normalizer(samples.iter().map(|s| s.mu));
    let mut out = String::from("z_m,mu,mu_normalized,u,v,w\n");
    for s in samples {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            fmt12(s.z),
            fmt12(s.mu),
            fmt12(normalized(s.mu, peak)),
            fmt12(s.point.u),
            fmt12(s.point.v),
            fmt12(s.point.w)
        );
    }
    out
}

/// Columns `deviation,mu,mu_normalized`.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("deviation,mu,mu_normalized\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{}", fmt12(r.deviation), fmt12(r.mu), fmt12(r.normalized));
    }
    out
}

/// Summary lines followed by the `n,probability` table.
pub fn stats_table(d: &PhotonNumberDistribution) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "mu={}", fmt12(d.mean));
    let _ = writeln!(out, "p={}", fmt12(d.p));
    let _ = writeln!(out, "variance={}", fmt12(d.variance));
    let _ = writeln!(out, "multi_pair_probability={}", fmt12(d.multi_pair()));
    out.push_str("n,probability\n");
    for (n, p) in d.probabilities.iter().enumerate() {
        let _ = writeln!(out, "{n},{}", fmt12(*p));
    }
    out
}

/// Parse a numeric CSV with a header row.
pub fn parse_csv(text: &str) -> Result<(Vec<String>, Vec<Vec<f64>>), String> {
    let mut lines = text.lines();
    let header: Vec<String> = lines.next().ok_or("empty table")?.split(',').map(str::to_owned).collect();
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let row = line
            .split(',')
            .map(|c| c.parse::<f64>().map_err(|e| format!("row {}: {e}", i + 1)))
            .collect::<Result<Vec<_>, _>>()?;
        if row.len() != header.len() {
            return Err(format!("row {} has {} columns, expected {}", i + 1, row.len(), header.len()));
        }
        rows.push(row);
    }
    Ok((header, rows))
}
