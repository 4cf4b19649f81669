//! Audit suites: each returns named checks and writes its CSV report.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::Result;
use clap::ValueEnum;
use libm::erfc;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use fracns::analysis::{estimate_bilinear_constants, estimate_holder};
use fracns::solops::{
    audit_operator_bounds, check_commutation, contour_eval_scalar, log_grid, symbol_s, symbol_t, Bound, Family,
    OperatorFamily,
};
use fracns::specfun::{gamma, mainardi_laplace, mainardi_moment, mittag_leffler, FractionalOrder};
use fracns::spectral::{
    dense_nonlinear_term, nonlinear_term, random_field, taylor_green, SpectralField, SpectralGrid, SpectralOperator,
};

use crate::solve::C1_DECAYS;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Specfun,
    Operators,
    Bilinear,
    Regularity,
    All,
}

impl Suite {
    pub fn expand(self) -> Vec<Suite> {
        match self {
            Suite::All => vec![Suite::Specfun, Suite::Operators, Suite::Bilinear, Suite::Regularity],
            s => vec![s],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Suite::Specfun => "specfun",
            Suite::Operators => "operators",
            Suite::Bilinear => "bilinear",
            Suite::Regularity => "regularity",
            Suite::All => "all",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    /// Passes when `value <= tolerance` (and is finite).
    fn at_most(suite: &'static str, name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self { suite, name: name.into(), value, tolerance, pass: value.is_finite() && value <= tolerance }
    }

    /// Passes when `value >= bound`.
    fn at_least(suite: &'static str, name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self { suite, name: name.into(), value, tolerance: bound, pass: value.is_finite() && value >= bound }
    }
}

pub fn write_checks(path: &Path, checks: &[Check]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "suite,check,value,tolerance,pass")?;
    for c in checks {
        writeln!(w, "{},{},{:.6e},{:.6e},{}", c.suite, c.name, c.value, c.tolerance, c.pass)?;
    }
    Ok(())
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

pub fn specfun() -> Result<Vec<Check>> {
    const S: &str = "specfun";
    let mut out = Vec::new();
    let mut worst: f64 = 0.0;
    for i in 0..=550 {
        let x = -50.0 + 0.1 * i as f64;
        worst = worst.max(rel(mittag_leffler(1.0, 1.0, x)?, x.exp()));
    }
    out.push(Check::at_most(S, "E_1_1_vs_exp", worst, 1e-12));
    let mut worst: f64 = 0.0;
    for i in 0..=500 {
        let x = 0.01 * i as f64;
        worst = worst.max(rel(mittag_leffler(0.5, 1.0, -x)?, (x * x).exp() * erfc(x)));
    }
    out.push(Check::at_most(S, "E_half_vs_erfc", worst, 1e-10));
    for a in [0.3, 0.5, 0.7] {
        let order = FractionalOrder::new(a)?;
        let mut worst: f64 = 0.0;
        for q in 0..=3 {
            let q = q as f64;
            worst = worst.max((mainardi_moment(order, q)? - gamma(q + 1.0) / gamma(a * q + 1.0)).abs());
        }
        out.push(Check::at_most(S, format!("mainardi_moments_alpha_{a}"), worst, 1e-8));
        let mut worst: f64 = 0.0;
        for p in [0.1, 1.0, 5.0] {
            worst = worst.max(rel(mainardi_laplace(order, p)?, mittag_leffler(a, 1.0, -p)?));
        }
        out.push(Check::at_most(S, format!("mainardi_laplace_alpha_{a}"), worst, 1e-6));
    }
    Ok(out)
}

pub fn operators(out_dir: &Path, seed: u64) -> Result<Vec<Check>> {
    const S: &str = "operators";
    let mut out = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let a = FractionalOrder::new(rng.random_range(0.1..0.95))?;
        let l = 10f64.powf(rng.random_range(-1.0..3.0));
        let t = 10f64.powf(rng.random_range(-2.0..1.0));
        worst = worst.max(rel(contour_eval_scalar(a, l, t, Family::S)?, symbol_s(a, l, t)?));
        worst = worst.max(rel(contour_eval_scalar(a, l, t, Family::T)?, symbol_t(a, l, t)?));
    }
    out.push(Check::at_most(S, "contour_vs_symbols", worst, 1e-8));

    let grid = SpectralGrid::new(2, 16, 1.0)?;
    let op = SpectralOperator::stokes(grid);
    let betas = [0.25, 0.5, 0.75];
    let mut report = fracns::solops::BoundReport::default();
    for a in [0.3, 0.5, 0.7] {
        let fam = OperatorFamily::new(FractionalOrder::new(a)?, op.clone());
        let coarse = audit_operator_bounds(&fam, &betas, &log_grid(1e-3, 10.0, 12))?;
        let fine = audit_operator_bounds(&fam, &betas, &log_grid(1e-3, 10.0, 120))?;
        for (bound, beta) in [(Bound::C1, 0.0), (Bound::C2, 0.0), (Bound::B1, 0.0), (Bound::B3, 0.5)] {
            let (c, f) = (coarse.constant(bound, beta).unwrap(), fine.constant(bound, beta).unwrap());
            out.push(Check::at_most(S, format!("{}_alpha_{a}_grid_stability", bound.id()), rel(c, f), 0.1));
        }
        report.rows.extend(fine.rows);
        let u = random_field(&grid, 1.0, &mut rng);
        let mut worst: f64 = 0.0;
        for (beta, t) in [(0.25, 0.01), (0.5, 0.3), (0.75, 2.0)] {
            worst = worst.max(check_commutation(&fam, beta, &u, t)?);
        }
        out.push(Check::at_most(S, format!("commutation_alpha_{a}"), worst, 1e-13));
    }
    report.write_csv(BufWriter::new(File::create(out_dir.join("bounds.csv"))?))?;
    Ok(out)
}

pub fn bilinear(out_dir: &Path, seed: u64) -> Result<Vec<Check>> {
    const S: &str = "bilinear";
    let mut out = Vec::new();
    let mut rows = Vec::new();
    for n in [16, 32] {
        let g = SpectralGrid::new(2, n, 1.0)?;
        let c = estimate_bilinear_constants(&g, 1000, &C1_DECAYS, seed)?;
        rows.push((n, c.c1, c.c2));
    }
    let mut w = BufWriter::new(File::create(out_dir.join("bilinear.csv"))?);
    writeln!(w, "n_modes,c1,c2")?;
    for (n, c1, c2) in &rows {
        writeln!(w, "{n},{c1:.17e},{c2:.17e}")?;
    }
    out.push(Check::at_most(S, "c1_refinement_change", rel(rows[0].1, rows[1].1), 0.2));
    out.push(Check::at_most(S, "c2_refinement_change", rel(rows[0].2, rows[1].2), 0.2));
    let g = SpectralGrid::new(2, 32, 1.0)?;
    let tg = taylor_green(&g, 1.0);
    out.push(Check::at_most(S, "taylor_green_dense", dense_nonlinear_term(&tg)?.norm(), 1e-10));
    out.push(Check::at_most(S, "taylor_green_fast", nonlinear_term(&tg)?.norm(), 1e-10));
    Ok(out)
}

pub fn regularity(out_dir: &Path) -> Result<Vec<Check>> {
    const S: &str = "regularity";
    let mut out = Vec::new();
    let mut w = BufWriter::new(File::create(out_dir.join("regularity.csv"))?);
    writeln!(w, "case,alpha,beta,theta_measured,theta_predicted,fit_r2")?;
    let scalar = SpectralOperator::synthetic(vec![1.0])?;
    for theta in [0.2, 0.4, 0.6] {
        let t0 = 0.5;
        let times: Vec<f64> = (0..257).map(|i| t0 + i as f64 / 256.0).collect();
        let fields: Vec<_> = times.iter().map(|&t| SpectralField::diagonal(&[(t - t0).powf(theta)])).collect();
        let rep = estimate_holder(&times, &fields, &scalar, 0.5, 1.0)?;
        writeln!(w, "power_law,,,{},{theta},{}", rep.theta_measured, rep.fit_quality)?;
        out.push(Check::at_most(S, format!("calibration_{theta}"), (rep.theta_measured - theta).abs(), 0.02));
    }
    let grid = SpectralGrid::new(2, 16, 1.0)?;
    let op = SpectralOperator::stokes(grid);
    let x = random_field(&grid, 3.0, &mut ChaCha8Rng::seed_from_u64(1));
    for a in [0.3, 0.5, 0.7] {
        let fam = OperatorFamily::new(FractionalOrder::new(a)?, op.clone());
        let times: Vec<f64> = (0..129).map(|i| 1e-3 * (1 + i) as f64).collect();
        let fields = times.iter().map(|&t| fam.apply_s(t, &x)).collect::<fracns::Result<Vec<_>>>()?;
        for beta in [0.5, 0.75] {
            let rep = estimate_holder(&times, &fields, &op, beta, a)?;
            writeln!(w, "solution_operator,{a},{beta},{},{},{}", rep.theta_measured, rep.theta_predicted, rep.fit_quality)?;
            out.push(Check::at_least(
                S,
                format!("holder_alpha_{a}_beta_{beta}"),
                rep.theta_measured,
                rep.theta_predicted - 0.1,
            ));
        }
    }
    Ok(out)
}

pub fn run(suite: Suite, out_dir: &Path, seed: u64) -> Result<Vec<Check>> {
    std::fs::create_dir_all(out_dir)?;
    let mut all = Vec::new();
    for s in suite.expand() {
        let checks = match s {
            Suite::Specfun => specfun()?,
            Suite::Operators => operators(out_dir, seed)?,
            Suite::Bilinear => bilinear(out_dir, seed)?,
            Suite::Regularity => regularity(out_dir)?,
            Suite::All => unreachable!(),
        };
        write_checks(&out_dir.join(format!("verify_{}.csv", s.name())), &checks)?;
        all.extend(checks);
    }
    Ok(all)
}
