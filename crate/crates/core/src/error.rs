use alloc::string::String;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid segment {index}: {reason}")]
    InvalidSegment { index: usize, reason: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("ODE oracle failed: {0}")]
    OracleFailure(String),

    #[error("calibration failed: {0}")]
    Calibration(String),

    #[error("axis `{0}` has no calibrated sensitivity coefficient")]
    Uncalibrated(&'static str),

    #[error("numerical inconsistency: {0}")]
    NumericalConsistency(String),

    #[error("degenerate design: {0}")]
    DegenerateDesign(String),

    #[error("scan range too small: {0}")]
    InsufficientRange(String),

    #[error("segment {index} violates the harmonic regime: {reason}")]
    RegimeViolation { index: usize, reason: String },

    #[error("segment {index} cannot be fabricated: {reason}")]
    Fabrication { index: usize, reason: String },
}

/// Convenience alias.
pub type Result<T> = core::result::Result<T, Error>;
