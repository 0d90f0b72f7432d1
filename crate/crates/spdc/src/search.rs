//! Multi-start design search spread over threads.

use rayon::prelude::*;
use spdc_core::designer::{merge, solve_start, DesignConstraints, SolveOptions, SolveResult};
use spdc_core::sensitivity::SensitivityCoefficients;
use spdc_core::Result;

/// Same result as [`spdc_core::designer::solve`], computed in parallel.
pub fn solve_parallel(opts: &SolveOptions, constraints: &DesignConstraints, coeffs: &SensitivityCoefficients) -> Result<SolveResult> {
    opts.validate()?;
    constraints.validate()?;
    let outcomes = (0..opts.starts).into_par_iter().map(|i| solve_start(opts, constraints, coeffs, i)).collect();
    Ok(merge(outcomes))
}
