use std::fs::File;
use std::io::BufWriter;
use std::path::Path;
use std::time::Instant;

use anyhow::{Context, Result};

use fracns::analysis::estimate_bilinear_constants;
use fracns::delaysolver::{MonitorConstants, Solver, Verdict};
use fracns::spectral::io::{write_field, write_spectrum_csv};

use crate::config::RunConfig;
use crate::manifest::{ConstantsInfo, MonitorInfo, RunInfo, RunManifest};

/// Spectral decays of the random fields used to estimate `c1`.
pub const C1_DECAYS: [f64; 3] = [1.5, 2.0, 3.0];

pub enum SolveOutcome {
    Completed,
    Halted { t_max: f64 },
}

pub fn monitor_constants(cfg: &RunConfig, notes: &mut Vec<String>) -> Result<MonitorConstants> {
    let c1 = match cfg.monitor.c1 {
        Some(c) => {
            notes.push("c1 from config".into());
            c
        }
        None => {
            let grid = fracns::spectral::SpectralGrid::new(cfg.dim, cfg.n_modes, cfg.nu)?;
            let est = estimate_bilinear_constants(&grid, cfg.monitor.samples, &C1_DECAYS, cfg.seed)?;
            notes.extend(est.notes);
            est.c1
        }
    };
    notes.push("B3 from the sharp diagonal sup".into());
    Ok(MonitorConstants::with_sharp_b3(cfg.order()?, c1)?)
}

fn dump(path: &Path, u: &fracns::spectral::SpectralField) -> Result<()> {
    let mut w = BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?);
    write_field(u, &mut w)?;
    Ok(())
}

pub fn run(cfg: &RunConfig, out: &Path) -> Result<SolveOutcome> {
    let start = Instant::now();
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let problem = cfg.build()?;
    let mut notes = Vec::new();
    let constants = monitor_constants(cfg, &mut notes)?;
    let mut solver = Solver::new(problem.solver, problem.op, problem.force.clone(), problem.history, constants)?;
    if let Some(r) = cfg.monitor.radius {
        solver.set_radius(r)?;
    }

    let mut outputs = Vec::new();
    let mut pending: Vec<f64> = cfg.output.checkpoints.clone();
    pending.sort_by(f64::total_cmp);
    let mut pending = pending.into_iter().peekable();
    let mut dumps = 0;
    while !solver.is_finished() {
        match solver.mild_step() {
            Ok(_) | Err(fracns::Error::BlowUp { .. }) => {}
            Err(e) => return Err(e.into()),
        }
        let t = solver.state().t_now();
        while pending.peek().is_some_and(|&c| c <= t + 1e-12) {
            pending.next();
            let name = format!("checkpoint_{dumps:03}.bin");
            dump(&out.join(&name), solver.state().u_now())?;
            outputs.push(name);
            dumps += 1;
        }
    }

    let state = solver.state();
    state.write_trajectory_csv(BufWriter::new(File::create(out.join("trajectory.csv"))?))?;
    dump(&out.join("field_final.bin"), state.u_now())?;
    write_spectrum_csv(state.u_now(), BufWriter::new(File::create(out.join("spectrum_final.csv"))?))?;
    write_spectrum_csv(&problem.u0, BufWriter::new(File::create(out.join("spectrum_initial.csv"))?))?;
    outputs.extend(["trajectory.csv", "field_final.bin", "spectrum_final.csv", "spectrum_initial.csv"].map(String::from));

    let summary = solver.summary();
    let (verdict, t_max) = match summary.verdict {
        Verdict::Continue => ("continue".to_string(), None),
        Verdict::Halt { t_max, .. } => ("halt".to_string(), Some(t_max)),
    };
    let mon = solver.monitor();
    let mut manifest = RunManifest::new(RunInfo::new("solve", cfg.seed, start.elapsed().as_secs_f64()));
    manifest.config = Some(cfg.clone());
    manifest.constants = Some(ConstantsInfo {
        c1: constants.c1,
        b3_half: constants.b3_half,
        b3_three_quarter: constants.b3_three_quarter,
        lipschitz: mon.lipschitz,
        radius: mon.radius,
        source: notes,
    });
    manifest.monitor = Some(MonitorInfo {
        steps: summary.steps,
        t_final: summary.t_final,
        verdict,
        t_max,
        max_contraction: summary.max_contraction,
        monitor_warnings: summary.monitor_warnings,
        ball_violations: summary.ball_violations,
        max_picard_iters: state.records.iter().map(|r| r.picard_iters).max().unwrap_or(0),
    });
    manifest.outputs = outputs;
    manifest.write(out)?;
    if summary.monitor_warnings > 0 {
        eprintln!(
            "warning: contraction constant reached {:.3} (>= 1 on {} steps); Picard still converged",
            summary.max_contraction, summary.monitor_warnings
        );
    }
    Ok(match t_max {
        Some(t_max) => SolveOutcome::Halted { t_max },
        None => SolveOutcome::Completed,
    })
}
