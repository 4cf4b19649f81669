use std::io::Write;

use serde::Serialize;

use super::holder::fit_line;
use crate::error::{Error, Result};
use crate::spectral::SpectralField;

/// Errors below this fraction of the reference norm count as exact.
const EXACT: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceLevel {
    pub n_steps: usize,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub levels: Vec<ConvergenceLevel>,
    pub reference_steps: usize,
    /// least-squares slope of `-log error` against `log n`; `None` when exact
    pub order: Option<f64>,
    /// orders between consecutive levels
    pub pairwise: Vec<f64>,
    pub exact: bool,
    pub monotone: bool,
}

impl ConvergenceReport {
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let mut s = String::from("n_steps,error,order\n");
        for (i, l) in self.levels.iter().enumerate() {
            let p = if i == 0 { String::new() } else { format!("{:.6}", self.pairwise[i - 1]) };
            s.push_str(&format!("{},{:.17e},{}\n", l.n_steps, l.error, p));
        }
        s.push_str(&format!("{},0,\n", self.reference_steps));
        w.write_all(s.as_bytes())?;
        Ok(())
    }
}

/// Errors of `solve(n)` for each `n` of a doubling ladder against `solve(4 * n_max)`,
/// with the observed order.
pub fn run_convergence_study(
    solve: impl Fn(usize) -> Result<SpectralField>,
    ladder: &[usize],
) -> Result<ConvergenceReport> {
    if ladder.len() < 3 {
        return Err(Error::Config(format!("convergence ladder needs >= 3 levels, got {}", ladder.len())));
    }
    if ladder.windows(2).any(|w| w[1] != 2 * w[0]) || ladder[0] == 0 {
        return Err(Error::Config(format!("ladder must refine by exactly 2x per level: {ladder:?}")));
    }
    let reference_steps = 4 * ladder[ladder.len() - 1];
    let reference = solve(reference_steps).map_err(|e| match e {
        Error::BlowUp { t, .. } => Error::Degenerate(format!("reference run halted by blow-up at t = {t}")),
        e => e,
    })?;
    let scale = reference.norm().max(f64::MIN_POSITIVE);
    let mut levels = Vec::new();
    for &n in ladder {
        let u = solve(n)?;
        levels.push(ConvergenceLevel { n_steps: n, error: u.sub(&reference)?.norm() });
    }
    let exact = levels.iter().all(|l| l.error <= EXACT * scale);
    let pairwise: Vec<f64> = levels.windows(2).map(|w| (w[0].error / w[1].error).log2()).collect();
    let order = (!exact).then(|| {
        let x: Vec<f64> = levels.iter().map(|l| (l.n_steps as f64).ln()).collect();
        let y: Vec<f64> = levels.iter().map(|l| -l.error.ln()).collect();
        fit_line(&x, &y).0
    });
    let monotone = levels.windows(2).all(|w| w[1].error < w[0].error);
    Ok(ConvergenceReport { levels, reference_steps, order, pairwise, exact, monotone })
}
