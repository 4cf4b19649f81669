use std::fs::File;
use std::io::BufWriter;
use std::path::Path;
use std::time::Instant;

use anyhow::{Context, Result};

use fracns::analysis::{run_convergence_study, ConvergenceReport};
use fracns::delaysolver::Solver;
use fracns::spectral::SpectralField;

use crate::config::RunConfig;
use crate::manifest::{RunInfo, RunManifest};
use crate::solve::monitor_constants;

pub fn run(cfg: &RunConfig, ladder: &[usize], out: &Path) -> Result<ConvergenceReport> {
    let start = Instant::now();
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let mut notes = Vec::new();
    let constants = monitor_constants(cfg, &mut notes)?;
    let solve = |n: usize| -> fracns::Result<SpectralField> {
        let mut level = cfg.clone();
        level.n_steps = n;
        let p = level.build().map_err(|e| fracns::Error::Config(format!("{e:#}")))?;
        let mut s = Solver::new(p.solver, p.op, p.force, p.history, constants)?;
        let summary = s.run()?;
        if let fracns::delaysolver::Verdict::Halt { t_max, norm } = summary.verdict {
            return Err(fracns::Error::BlowUp { t: t_max, norm, threshold: cfg.blowup.threshold });
        }
        Ok(s.state().u_now().clone())
    };
    let report = run_convergence_study(solve, ladder)?;
    report.write_csv(BufWriter::new(File::create(out.join("convergence.csv"))?))?;

    let mut manifest = RunManifest::new(RunInfo::new("convergence", cfg.seed, start.elapsed().as_secs_f64()));
    manifest.config = Some(cfg.clone());
    let r = &mut manifest.results;
    r.insert("ladder".into(), toml::Value::try_from(ladder)?);
    r.insert("reference_steps".into(), (report.reference_steps as i64).into());
    r.insert("errors".into(), toml::Value::try_from(report.levels.iter().map(|l| l.error).collect::<Vec<_>>())?);
    if let Some(p) = report.order {
        r.insert("order".into(), p.into());
    }
    r.insert("exact".into(), report.exact.into());
    r.insert("monotone".into(), report.monotone.into());
    manifest.outputs = vec!["convergence.csv".into()];
    manifest.write(out)?;
    Ok(report)
}
