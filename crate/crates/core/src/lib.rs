//! Robust spontaneous parametric down-conversion by detuning-modulated
//! composite segments.
//!
//! The crate is `no_std` (with `alloc`) and contains only pure numerics:
//!
//! - [`su11`]: the exact undepleted-pump propagator of one crystal segment, the
//!   composite product through a segmented crystal, trajectories and the
//!   hyperboloid picture of the SU(1,1) dynamics.
//! - [`ode`]: an adaptive Dormand-Prince integrator of the coupled amplitude
//!   equations, used as an independent oracle for the closed forms.
//! - [`stats`]: thermal pair-number statistics.
//! - [`physics`]: nonlinear coupling from material and pump parameters.
//! - [`sensitivity`]: linear maps from temperature, wavelength and angle
//!   deviations to the common phase-mismatch error.
//! - [`robustness`]: error derivatives, the flatness metric, 90% widths,
//!   efficiency against a periodically poled reference, sweeps and scaling.
//! - [`designer`]: the anti-symmetric segment family, the multi-start
//!   derivative-zeroing search, validation and poling-pattern export.
//!
//! Enable the `std` feature to use the platform `libm` instead of the bundled
//! one.

#![no_std]

extern crate alloc;
#[cfg(any(feature = "std", test))]
extern crate std;

pub mod designer;
pub mod error;
pub mod jet;
pub mod lm;
pub mod ode;
pub mod physics;
pub mod robustness;
pub mod sensitivity;
pub mod stats;
pub mod su11;

pub use error::{Error, Result};
pub use su11::{Design, HyperboloidPoint, Regime, Segment, Su11Matrix};

/// Complex number type used throughout the crate.
pub type Complex = num_complex::Complex64;
