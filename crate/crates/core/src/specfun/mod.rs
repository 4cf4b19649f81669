//! Scalar special functions and fractional-calculus operators on sampled grids.

mod fractional;
mod gamma;
mod mainardi;
mod mittag_leffler;

pub use fractional::{caputo_derivative, rl_integral, FractionalOrder, SampledFunction};
pub use gamma::{gamma, ln_gamma, rgamma, sin_pi};
pub use mainardi::{mainardi, mainardi_laplace, mainardi_moment};
pub use mittag_leffler::{mittag_leffler, mittag_leffler_1};
