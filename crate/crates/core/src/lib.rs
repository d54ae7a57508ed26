//! Geometric phase of a uniformly accelerated two-level atom coupled to the
//! vacuum electromagnetic field, treated as an open quantum system.
//!
//! * [`bath`]: worldline, field correlations, spectral density and the
//!   Kossakowski rates they induce.
//! * [`dynamics`]: exact reduced density matrix and an RK4 Lindblad integrator.
//! * [`phase`]: the mixed-state geometric phase by several independent routes,
//!   and the accelerated-minus-inertial difference.
//!
//! All quantities are dimensionless, in units of the bare transition
//! frequency ω₀.

// `!(x > 0.0)` guards are meant to reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bath;
pub mod dynamics;
pub mod error;
pub mod phase;
pub mod quad;

pub use bath::{
    kossakowski, kossakowski_from_spectrum, spectral_density, AtomBathParams, KossakowskiCoeffs,
    SpacetimePoint,
};
pub use dynamics::{integrate_lindblad, rho_closed_form, BlochVector, DensityMatrix, Trajectory};
pub use error::{Error, Result};
pub use phase::{
    phase_closed_form, phase_difference, phase_first_order, phase_kinematic, phase_quadrature,
    EigenFrame, Method, PhaseDifference, PhaseResult,
};

/// Formats a number for CSV output: 17 significant digits in scientific
/// notation, so values round-trip exactly. Negative zero prints as `0`.
pub fn fmt_num(x: f64) -> String {
    format!("{:.16e}", x + 0.0)
}
