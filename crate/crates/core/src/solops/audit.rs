//! Empirical constants for the norm bounds of the solution operators.
//!
//! Each bound has the form `||A^beta X(t)|| <= K t^p`. The operator norm of a
//! diagonal operator is the sup of its symbol over the spectrum; we take that sup
//! over the eigenvalue table together with a logarithmic sweep of
//! `[lambda_min, 1e6]`, then report `raw * t^{-p}` per `t` and its sup over `t`.

use std::io::Write;

use serde::Serialize;

use super::family::{symbol_s, symbol_t, OperatorFamily};
use crate::error::Result;
use crate::specfun::{mittag_leffler, FractionalOrder};

const LAMBDA_SWEEP_MAX: f64 = 1e6;
const LAMBDA_SWEEP_POINTS: usize = 600;

/// The audited bounds, named after their constants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Bound {
    /// `||S(t)|| <= C1`
    C1,
    /// `||A S(t)|| <= C2 t^{-alpha}`
    C2,
    /// sharp diagonal form `||A^beta S(t)|| <= C3 t^{-alpha beta}`
    C3,
    /// `||T(t)|| <= B1 t^{alpha-1}`
    B1,
    /// `||A T(t)|| <= B2 t^{-1}`
    B2,
    /// `||A^beta T(t)|| <= B3 t^{alpha(1-beta)-1}`
    B3,
}

impl Bound {
    pub fn id(self) -> &'static str {
        match self {
            Bound::C1 => "C1",
            Bound::C2 => "C2",
            Bound::C3 => "C3",
            Bound::B1 => "B1",
            Bound::B2 => "B2",
            Bound::B3 => "B3",
        }
    }

    fn uses_beta(self) -> bool {
        matches!(self, Bound::C3 | Bound::B3)
    }

    /// `(power of A, t-exponent of the claimed bound)`.
    fn shape(self, alpha: f64, beta: f64) -> (f64, f64) {
        match self {
            Bound::C1 => (0.0, 0.0),
            Bound::C2 => (1.0, -alpha),
            Bound::C3 => (beta, -alpha * beta),
            Bound::B1 => (0.0, alpha - 1.0),
            Bound::B2 => (1.0, -1.0),
            Bound::B3 => (beta, alpha * (1.0 - beta) - 1.0),
        }
    }

    fn is_s(self) -> bool {
        matches!(self, Bound::C1 | Bound::C2 | Bound::C3)
    }

    pub const ALL: [Bound; 6] = [Bound::C1, Bound::C2, Bound::C3, Bound::B1, Bound::B2, Bound::B3];
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundRow {
    pub bound: Bound,
    pub beta: f64,
    pub t: f64,
    pub raw_norm: f64,
    pub normalized: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct BoundReport {
    pub rows: Vec<BoundRow>,
}

impl BoundReport {
    /// Sup of the normalized constant over `t` for one `(bound, beta)`.
    pub fn constant(&self, bound: Bound, beta: f64) -> Option<f64> {
        self.rows
            .iter()
            .filter(|r| r.bound == bound && r.beta == beta)
            .map(|r| r.normalized)
            .reduce(f64::max)
    }

    /// Every `(bound, beta)` pair with its constant, in first-appearance order.
    pub fn constants(&self) -> Vec<(Bound, f64, f64)> {
        let mut out: Vec<(Bound, f64, f64)> = Vec::new();
        for r in &self.rows {
            match out.iter_mut().find(|(b, beta, _)| *b == r.bound && *beta == r.beta) {
                Some(entry) => entry.2 = entry.2.max(r.normalized),
                None => out.push((r.bound, r.beta, r.normalized)),
            }
        }
        out
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let mut s = String::from("bound,beta,t,raw_norm,normalized\n");
        for r in &self.rows {
            s.push_str(&format!(
                "{},{},{:.17e},{:.17e},{:.17e}\n",
                r.bound.id(),
                r.beta,
                r.t,
                r.raw_norm,
                r.normalized
            ));
        }
        w.write_all(s.as_bytes())?;
        Ok(())
    }
}

fn spectrum(fam: &OperatorFamily) -> Vec<f64> {
    let mut ls = fam.distinct_eigenvalues();
    let lo = fam.op().lambda_min();
    if lo < LAMBDA_SWEEP_MAX {
        let ratio = (LAMBDA_SWEEP_MAX / lo).ln();
        for i in 0..LAMBDA_SWEEP_POINTS {
            ls.push(lo * (ratio * i as f64 / (LAMBDA_SWEEP_POINTS - 1) as f64).exp());
        }
    }
    ls
}

/// `sup_lambda lambda^power |symbol(lambda, t)|`.
fn operator_norm(fam: &OperatorFamily, ls: &[f64], bound: Bound, power: f64, t: f64) -> Result<f64> {
    let a = fam.alpha();
    let mut sup: f64 = 0.0;
    for &l in ls {
        let v = if bound.is_s() { symbol_s(a, l, t)? } else { symbol_t(a, l, t)? };
        sup = sup.max(l.powf(power) * v.abs());
    }
    Ok(sup)
}

/// Normalized constants of every bound at every `t`; `betas` feed the
/// fractional-power bounds (C3, B3).
pub fn audit_operator_bounds(fam: &OperatorFamily, betas: &[f64], t_grid: &[f64]) -> Result<BoundReport> {
    let ls = spectrum(fam);
    let alpha = fam.alpha().value();
    let mut rows = Vec::new();
    for bound in Bound::ALL {
        let bs: Vec<f64> = if bound.uses_beta() { betas.to_vec() } else { vec![0.0] };
        for beta in bs {
            let (power, p) = bound.shape(alpha, beta);
            for &t in t_grid {
                let raw = operator_norm(fam, &ls, bound, power, t)?;
                rows.push(BoundRow {
                    bound,
                    beta,
                    t,
                    raw_norm: raw,
                    normalized: raw * t.powf(-p),
                });
            }
        }
    }
    Ok(BoundReport { rows })
}

/// `B3(alpha, beta) = sup_{x > 0} x^beta E_{alpha,alpha}(-x)`, the smallest constant in
/// `||A^beta T(t)|| <= B3 t^{alpha(1-beta)-1}` over the whole positive half-line
/// (substitute `x = lambda t^alpha`). Log sweep of `[1e-8, 1e8]` refined around the max.
pub fn b3_sharp(alpha: FractionalOrder, beta: f64) -> Result<f64> {
    let a = alpha.value();
    let f = |x: f64| -> Result<f64> { Ok(x.powf(beta) * mittag_leffler(a, a, -x)?) };
    let grid = log_grid(1e-8, 1e8, 1601);
    let mut best = (0usize, f64::MIN);
    for (i, &x) in grid.iter().enumerate() {
        let v = f(x)?;
        if v > best.1 {
            best = (i, v);
        }
    }
    let lo = grid[best.0.saturating_sub(1)];
    let hi = grid[(best.0 + 1).min(grid.len() - 1)];
    let fine = log_grid(lo, hi, 201);
    let mut sup = best.1;
    for x in fine {
        sup = sup.max(f(x)?);
    }
    Ok(sup)
}

/// `n` log-spaced points on `[t_min, t_max]`.
pub fn log_grid(t_min: f64, t_max: f64, n: usize) -> Vec<f64> {
    let r = (t_max / t_min).ln();
    (0..n)
        .map(|i| t_min * (r * i as f64 / (n.max(2) - 1) as f64).exp())
        .collect()
}

/// Largest relative change of any constant between two reports.
pub fn max_relative_change(coarse: &BoundReport, fine: &BoundReport) -> f64 {
    coarse
        .constants()
        .iter()
        .filter_map(|&(b, beta, c)| fine.constant(b, beta).map(|f| (f - c).abs() / f.abs().max(f64::MIN_POSITIVE)))
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::gamma;
    use crate::spectral::{SpectralGrid, SpectralOperator};

    fn family(a: f64) -> OperatorFamily {
        let g = SpectralGrid::new(2, 16, 1.0).unwrap();
        OperatorFamily::new(FractionalOrder::new(a).unwrap(), SpectralOperator::stokes(g))
    }

    #[test]
    fn s_bound_is_one_and_t_bound_is_reciprocal_gamma() {
        let fam = family(0.5);
        let rep = audit_operator_bounds(&fam, &[0.5], &log_grid(1e-10, 10.0, 40)).unwrap();
        let c1 = rep.constant(Bound::C1, 0.0).unwrap();
        assert!(c1 <= 1.0 && c1 > 0.9999, "{c1}");
        let b1 = rep.constant(Bound::B1, 0.0).unwrap();
        assert!((b1 - 1.0 / gamma(0.5)).abs() < 1e-3, "{b1}");
    }

    #[test]
    fn constants_are_finite_and_grid_stable() {
        for a in [0.3, 0.5, 0.7] {
            let fam = family(a);
            let betas = [0.25, 0.5, 0.75];
            let coarse = audit_operator_bounds(&fam, &betas, &log_grid(1e-3, 10.0, 12)).unwrap();
            let fine = audit_operator_bounds(&fam, &betas, &log_grid(1e-3, 10.0, 120)).unwrap();
            assert!(coarse.rows.iter().all(|r| r.normalized.is_finite()));
            let change = max_relative_change(&coarse, &fine);
            assert!(change < 0.1, "alpha {a}: {change}");
        }
    }

    #[test]
    fn sharp_b3_matches_audit_and_classical_limit() {
        let b = b3_sharp(FractionalOrder::classical(), 0.5).unwrap();
        assert!((b - (0.5f64 / std::f64::consts::E).sqrt()).abs() < 1e-6);
        for a in [0.3, 0.5, 0.7] {
            let fam = family(a);
            let rep = audit_operator_bounds(&fam, &[0.5], &log_grid(1e-4, 10.0, 60)).unwrap();
            let audited = rep.constant(Bound::B3, 0.5).unwrap();
            let sharp = b3_sharp(fam.alpha(), 0.5).unwrap();
            assert!(audited <= sharp * (1.0 + 1e-9));
            assert!(audited > 0.95 * sharp, "alpha {a}: {audited} vs {sharp}");
        }
    }

    #[test]
    fn csv_layout() {
        let fam = family(0.5);
        let rep = audit_operator_bounds(&fam, &[0.5], &[0.1, 1.0]).unwrap();
        let mut buf = Vec::new();
        rep.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("bound,beta,t,raw_norm,normalized\n"));
        assert_eq!(text.lines().count(), 1 + 6 * 2);
        assert!(text.contains("\nB3,0.5,"));
    }
}
