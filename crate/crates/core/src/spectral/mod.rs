//! Divergence-free Fourier surrogate on the periodic box: Leray projection, the
//! Stokes operator and its powers, and the advective nonlinearity.

mod field;
mod grid;
pub mod io;
mod nonlinear;
mod operator;
mod samples;
mod transform;

pub use field::{leray_project, FieldShape, SpectralField, INVARIANT_TOL};
pub use grid::SpectralGrid;
pub use nonlinear::{dense_nonlinear_term, nonlinear_term, Advection};
pub use operator::{apply_fractional_power, sobolev_norm, SpectralOperator};
pub use samples::{random_field, taylor_green};
pub use transform::Transform;
