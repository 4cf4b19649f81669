use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectral::{apply_fractional_power, SpectralField, SpectralOperator};

/// Increments below this are treated as zero.
const DEGENERATE: f64 = 1e-14;

/// Measured Hölder exponent of `t -> A^beta u(t)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegularityReport {
    pub beta: f64,
    pub theta_measured: f64,
    /// `alpha (1 - beta)`
    pub theta_predicted: f64,
    /// `R^2` of the log-log regression
    pub fit_quality: f64,
    pub window: (f64, f64),
    /// `(h, sup_t ||A^beta (u(t+h) - u(t))||)` per ladder rung
    pub ladder: Vec<(f64, f64)>,
}

impl RegularityReport {
    /// One-sided check: the trajectory is at least as regular as predicted.
    pub fn meets_prediction(&self, slack: f64) -> bool {
        self.theta_measured >= self.theta_predicted - slack
    }
}

/// Least-squares slope and `R^2` of `y` against `x`.
pub fn fit_line(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (slope, r2)
}

/// Hölder exponent of `A^beta u` from samples on a uniform grid of `[t0, T]`, `t0 > 0`.
///
/// For each `h = 2^j dt` (while `h` spans at most half the window) the increment is the
/// sup over base points, matching the `C^theta` seminorm; the exponent is the slope of
/// `log increment` against `log h`.
pub fn estimate_holder(
    times: &[f64],
    fields: &[SpectralField],
    op: &SpectralOperator,
    beta: f64,
    alpha: f64,
) -> Result<RegularityReport> {
    if times.len() != fields.len() {
        return Err(Error::InvalidSamples("times and fields differ in length".into()));
    }
    if times.len() < 32 {
        return Err(Error::InsufficientSamples(format!("need >= 32 samples, got {}", times.len())));
    }
    if !(times[0] > 0.0) {
        return Err(Error::Domain("the window must stay away from t = 0".into()));
    }
    let n = times.len();
    let dt = (times[n - 1] - times[0]) / (n - 1) as f64;
    if times.windows(2).any(|w| ((w[1] - w[0]) - dt).abs() > 1e-9 * dt) {
        return Err(Error::InvalidSamples("samples must be uniformly spaced".into()));
    }
    let powered = fields
        .par_iter()
        .map(|f| apply_fractional_power(op, beta, f))
        .collect::<Result<Vec<_>>>()?;
    let mut ladder = Vec::new();
    let mut step = 1;
    while 2 * step < n {
        let sup = (0..n - step)
            .into_par_iter()
            .map(|i| powered[i + step].sub(&powered[i]).map(|d| d.norm()))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        ladder.push((step as f64 * dt, sup));
        step *= 2;
    }
    if ladder.iter().all(|&(_, v)| v < DEGENERATE) {
        return Err(Error::Degenerate("all increments vanish".into()));
    }
    let used: Vec<(f64, f64)> = ladder.iter().copied().filter(|&(_, v)| v >= DEGENERATE).collect();
    if used.len() < 2 {
        return Err(Error::InsufficientSamples("fewer than two usable ladder rungs".into()));
    }
    let x: Vec<f64> = used.iter().map(|p| p.0.ln()).collect();
    let y: Vec<f64> = used.iter().map(|p| p.1.ln()).collect();
    let (slope, r2) = fit_line(&x, &y);
    Ok(RegularityReport {
        beta,
        theta_measured: slope,
        theta_predicted: alpha * (1.0 - beta),
        fit_quality: r2,
        window: (used[0].0, used[used.len() - 1].0),
        ladder,
    })
}
