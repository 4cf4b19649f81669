//! Solution operators `S_alpha(t)`, `T_alpha(t)` of the fractional Stokes problem,
//! evaluated diagonally through Mittag-Leffler symbols, plus an independent contour
//! evaluation and audits of their norm bounds.

mod audit;
mod contour;
mod family;

pub use audit::{audit_operator_bounds, b3_sharp, log_grid, max_relative_change, Bound, BoundReport, BoundRow};
pub use contour::{contour_eval_scalar, Family};
pub use family::{
    apply_s, apply_t, check_commutation, continuity_modulus, kernel_mass, symbol_s,
    symbol_s_derivative, symbol_t, OperatorFamily,
};
