//! wasm-bindgen bindings behind `www/index.html`. Every export returns a flat
//! `Float64Array`-friendly `Vec<f64>`; errors surface as JS exceptions.

use wasm_bindgen::prelude::*;

use fracns::delaysolver::{DelayedForce, HistorySegment, MonitorConstants, Solver, SolverConfig};
use fracns::specfun::{mainardi, mittag_leffler, FractionalOrder};
use fracns::spectral::{SpectralField, SpectralOperator};

fn js(e: fracns::Error) -> JsError {
    JsError::new(&e.to_string())
}

fn grid(x_max: f64, n: usize) -> Result<Vec<f64>, JsError> {
    if n < 2 || !(x_max > 0.0) {
        return Err(JsError::new("need n >= 2 points on a positive range"));
    }
    Ok((0..n).map(|i| x_max * i as f64 / (n - 1) as f64).collect())
}

/// `E_{alpha,beta}(-x)` on `n` equispaced points of `[0, x_max]`.
#[wasm_bindgen]
pub fn ml_curve(alpha: f64, beta: f64, x_max: f64, n: usize) -> Result<Vec<f64>, JsError> {
    grid(x_max, n)?.into_iter().map(|x| mittag_leffler(alpha, beta, -x).map_err(js)).collect()
}

/// Mainardi density `M_alpha(t)` on `n` equispaced points of `[0, t_max]`.
#[wasm_bindgen]
pub fn mainardi_curve(alpha: f64, t_max: f64, n: usize) -> Result<Vec<f64>, JsError> {
    let a = FractionalOrder::new(alpha).map_err(js)?;
    grid(t_max, n)?.into_iter().map(|t| mainardi(a, t).map_err(js)).collect()
}

/// Scalar Caputo delay problem `D^alpha y = -lambda y + kappa y(t - r)`, `y = 1`
/// on `[-r, 0]`. Returns `[t_0, y_0, t_1, y_1, ...]`; a run halted by the
/// blow-up monitor stops early.
#[wasm_bindgen]
pub fn delay_trajectory(
    alpha: f64,
    lambda: f64,
    kappa: f64,
    delay_r: f64,
    t_end: f64,
    n_steps: usize,
) -> Result<Vec<f64>, JsError> {
    let mut cfg = SolverConfig::new(FractionalOrder::new(alpha).map_err(js)?, t_end, n_steps);
    cfg.nonlinear = false;
    cfg.blowup_threshold = 1e6;
    let op = SpectralOperator::synthetic(vec![lambda]).map_err(js)?;
    let history = HistorySegment::constant(delay_r, SpectralField::diagonal(&[1.0])).map_err(js)?;
    let constants = MonitorConstants { c1: 0.0, b3_half: 1.0, b3_three_quarter: 1.0 };
    let mut solver = Solver::new(cfg, op, DelayedForce::point(kappa), history, constants).map_err(js)?;
    solver.run().map_err(js)?;
    Ok(solver.trajectory().into_iter().flat_map(|(t, u)| [t, u.coeffs()[0].re]).collect())
}
