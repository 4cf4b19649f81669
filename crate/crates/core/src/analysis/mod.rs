//! Post-hoc verification: Hölder exponents of trajectories, empirical bound
//! constants, convergence studies, and classical reference integrators.

mod constants;
mod convergence;
mod holder;
mod reference;

pub use constants::{bilinear_ratios, estimate_bilinear_constants, estimate_operator_constants, BilinearRatios, EstimatedConstants};
pub use convergence::{run_convergence_study, ConvergenceLevel, ConvergenceReport};
pub use holder::{estimate_holder, fit_line, RegularityReport};
pub use reference::{delay_ode_reference, etd2rk};
