mod config;
mod convergence;
mod manifest;
mod solve;
mod verify;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Result};
use clap::{Parser, Subcommand};

use config::RunConfig;
use manifest::{RunInfo, RunManifest};
use solve::SolveOutcome;
use verify::Suite;

/// Mild solutions of time-fractional Navier-Stokes equations with delayed forcing.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// output directory (overrides output.dir)
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// random seed (overrides the config's seed)
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// worker threads (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one configuration; exit 2 when the blow-up monitor halts the run.
    Solve {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run audit suites; exit 3 if any check fails.
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        suite: Suite,
    },
    /// Self-convergence study over a doubling ladder of step counts.
    Convergence {
        #[arg(long)]
        config: PathBuf,
        /// comma-separated step counts (overrides convergence.ladder)
        #[arg(long, value_delimiter = ',')]
        ladder: Option<Vec<usize>>,
    },
}

fn load(path: &Path, seed: Option<u64>) -> Result<RunConfig> {
    let mut cfg = RunConfig::load(path)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

fn out_dir(cli_out: &Option<PathBuf>, cfg: Option<&RunConfig>, fallback: &str) -> PathBuf {
    match (cli_out, cfg) {
        (Some(p), _) => p.clone(),
        (None, Some(c)) => PathBuf::from(&c.output.dir),
        (None, None) => PathBuf::from(fallback),
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    if let Some(n) = cli.threads {
        if n == 0 {
            bail!("--threads must be >= 1");
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    match &cli.command {
        Command::Solve { config } => {
            let cfg = load(config, cli.seed)?;
            let out = out_dir(&cli.output, Some(&cfg), "");
            match solve::run(&cfg, &out)? {
                SolveOutcome::Completed => {
                    println!("solve: completed t = {}, outputs in {}", cfg.t_end, out.display());
                    Ok(ExitCode::SUCCESS)
                }
                SolveOutcome::Halted { t_max } => {
                    println!("solve: blow-up monitor halted the run at t_max = {t_max}");
                    Ok(ExitCode::from(2))
                }
            }
        }
        Command::Verify { suite } => {
            let start = Instant::now();
            let seed = cli.seed.unwrap_or(config::DEFAULT_SEED);
            let out = out_dir(&cli.output, None, "fracns-verify");
            let checks = verify::run(*suite, &out, seed)?;
            let failed: Vec<_> = checks.iter().filter(|c| !c.pass).collect();
            for c in &checks {
                println!(
                    "{} {}/{}: {:.3e} (limit {:.3e})",
                    if c.pass { "PASS" } else { "FAIL" },
                    c.suite,
                    c.name,
                    c.value,
                    c.tolerance
                );
            }
            println!("verify {}: {} passed, {} failed", suite.name(), checks.len() - failed.len(), failed.len());
            let mut manifest = RunManifest::new(RunInfo::new("verify", seed, start.elapsed().as_secs_f64()));
            manifest.results.insert("suite".into(), suite.name().into());
            manifest.results.insert("passed".into(), ((checks.len() - failed.len()) as i64).into());
            manifest.results.insert("failed".into(), (failed.len() as i64).into());
            let names: Vec<String> = failed.iter().map(|c| format!("{}/{}", c.suite, c.name)).collect();
            manifest.results.insert("failed_checks".into(), toml::Value::try_from(&names)?);
            manifest.outputs = std::fs::read_dir(&out)?
                .filter_map(|e| e.ok()?.file_name().into_string().ok())
                .filter(|n| n.ends_with(".csv"))
                .collect();
            manifest.outputs.sort();
            manifest.write(&out)?;
            if failed.is_empty() {
                Ok(ExitCode::SUCCESS)
            } else {
                for n in names {
                    eprintln!("failed: {n}");
                }
                Ok(ExitCode::from(3))
            }
        }
        Command::Convergence { config, ladder } => {
            let cfg = load(config, cli.seed)?;
            let out = out_dir(&cli.output, Some(&cfg), "");
            let ladder = ladder.clone().unwrap_or_else(|| cfg.ladder());
            let report = convergence::run(&cfg, &ladder, &out)?;
            for l in &report.levels {
                println!("n = {:>6}: error {:.3e}", l.n_steps, l.error);
            }
            match report.order {
                Some(p) => println!("observed order {p:.3} (monotone: {})", report.monotone),
                None => println!("exact: all levels agree with the reference to rounding"),
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
