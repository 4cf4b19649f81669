//! Run configuration: flat TOML keys plus `[force]`, `[mesh]`, `[picard]`, `[blowup]`,
//! `[monitor]`, `[initial]`, `[output]` and `[convergence]` sections.

use std::path::Path;

use anyhow::{bail, Context, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use fracns::delaysolver::{DelayedForce, ForceKind, HistorySegment, Mesh, Modulation, SolverConfig};
use fracns::specfun::FractionalOrder;
use fracns::spectral::{random_field, sobolev_norm, taylor_green, SpectralField, SpectralGrid, SpectralOperator};

pub const DEFAULT_SEED: u64 = 20240611;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub alpha: f64,
    pub dim: usize,
    pub n_modes: usize,
    pub nu: f64,
    pub delay_r: f64,
    pub t_end: f64,
    pub n_steps: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// include the advection term
    #[serde(default = "yes")]
    pub nonlinear: bool,
    #[serde(default)]
    pub initial: InitialSection,
    #[serde(default)]
    pub force: ForceSection,
    #[serde(default)]
    pub mesh: MeshSection,
    #[serde(default)]
    pub picard: PicardSection,
    #[serde(default)]
    pub blowup: BlowupSection,
    #[serde(default)]
    pub monitor: MonitorSection,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default)]
    pub convergence: ConvergenceSection,
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialKind {
    /// random divergence-free field scaled to `||u||_{D(A^{1/2})} = amplitude`
    Random,
    TaylorGreen,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSection {
    pub kind: InitialKind,
    pub amplitude: f64,
    pub decay: f64,
}

impl Default for InitialSection {
    fn default() -> Self {
        Self { kind: InitialKind::Random, amplitude: 0.1, decay: 2.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForceSection {
    pub kind: ForceKind,
    pub kappa: f64,
    /// declared Lipschitz constant (defaults to the force's own)
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lf: Option<f64>,
    /// kernel samples on `[-r, 0]` for `distributed_delay` (default `w = 1/r`)
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    /// `omega(t) = 1 + amplitude cos(frequency t)` for `modulated_point_delay`
    #[serde(default)]
    pub modulation_amplitude: f64,
    #[serde(default)]
    pub modulation_frequency: f64,
    /// declared `L^p_loc` exponent of `omega`
    #[serde(default = "infinite_p")]
    pub p: f64,
}

fn infinite_p() -> f64 {
    f64::INFINITY
}

impl Default for ForceSection {
    fn default() -> Self {
        Self {
            kind: ForceKind::PointDelay,
            kappa: 0.0,
            lf: None,
            weights: None,
            modulation_amplitude: 0.0,
            modulation_frequency: 0.0,
            p: f64::INFINITY,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshSection {
    pub gamma: f64,
}

impl Default for MeshSection {
    fn default() -> Self {
        Self { gamma: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PicardSection {
    pub tol: f64,
    pub max_iters: usize,
}

impl Default for PicardSection {
    fn default() -> Self {
        Self { tol: 1e-12, max_iters: 50 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlowupSection {
    pub threshold: f64,
    /// watched norm: `D(A^beta)`, beta = 0.5 or 0.75
    pub beta: f64,
}

impl Default for BlowupSection {
    fn default() -> Self {
        Self { threshold: 1e8, beta: 0.5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonitorSection {
    /// bilinear constant; estimated from random fields when absent
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c1: Option<f64>,
    pub samples: usize,
    /// R-ball radius; defaults to `||phi||_{Y_{1/2}}`
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    pub strict_ball: bool,
}

impl Default for MonitorSection {
    fn default() -> Self {
        Self { c1: None, samples: 200, radius: None, strict_ball: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: String,
    /// times at which binary field dumps are written (the final field always is)
    #[serde(default)]
    pub checkpoints: Vec<f64>,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { dir: "fracns-out".into(), checkpoints: Vec::new() }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergenceSection {
    /// step counts, each twice the previous (default `n, 2n, 4n`)
    #[serde(default)]
    pub ladder: Vec<usize>,
}

/// Everything a run needs, built from a validated config.
pub struct Problem {
    pub op: SpectralOperator,
    pub u0: SpectralField,
    pub history: HistorySegment,
    pub force: DelayedForce,
    pub solver: SolverConfig,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).context("parsing config")?;
        cfg.validate()?;
        Ok(cfg)
    }

    #[cfg(test)]
    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            bail!("alpha must lie in (0, 1], got {}", self.alpha);
        }
        if self.dim != 2 && self.dim != 3 {
            bail!("dim must be 2 or 3, got {}", self.dim);
        }
        if self.n_modes < 4 {
            bail!("n_modes must be >= 4, got {}", self.n_modes);
        }
        if !(self.nu > 0.0) {
            bail!("nu must be positive, got {}", self.nu);
        }
        if !(self.delay_r > 0.0) {
            bail!("delay_r must be positive, got {}", self.delay_r);
        }
        if !(self.initial.amplitude >= 0.0) {
            bail!("initial.amplitude must be >= 0, got {}", self.initial.amplitude);
        }
        if let Some(lf) = self.force.lf {
            if !(lf >= 0.0) {
                bail!("force.lf must be >= 0, got {lf}");
            }
        }
        if self.monitor.samples < 100 && self.monitor.c1.is_none() {
            bail!("monitor.samples must be >= 100 to estimate c1, got {}", self.monitor.samples);
        }
        if self.output.checkpoints.iter().any(|t| !(*t > 0.0 && *t <= self.t_end)) {
            bail!("output.checkpoints must lie in (0, t_end]");
        }
        self.solver_config()?.validate()?;
        Ok(())
    }

    pub fn order(&self) -> Result<FractionalOrder> {
        Ok(FractionalOrder::try_from(self.alpha)?)
    }

    pub fn solver_config(&self) -> Result<SolverConfig> {
        let mut c = SolverConfig::new(self.order()?, self.t_end, self.n_steps);
        c.mesh = Mesh::from_gamma(self.mesh.gamma)?;
        c.picard_tol = self.picard.tol;
        c.picard_max_iters = self.picard.max_iters;
        c.blowup_threshold = self.blowup.threshold;
        c.half_norm_beta = self.blowup.beta;
        c.nonlinear = self.nonlinear;
        c.strict_ball = self.monitor.strict_ball;
        Ok(c)
    }

    pub fn ladder(&self) -> Vec<usize> {
        if self.convergence.ladder.is_empty() {
            vec![self.n_steps, 2 * self.n_steps, 4 * self.n_steps]
        } else {
            self.convergence.ladder.clone()
        }
    }

    pub fn build(&self) -> Result<Problem> {
        let grid = SpectralGrid::new(self.dim, self.n_modes, self.nu)?;
        let op = SpectralOperator::stokes(grid);
        let u0 = match self.initial.kind {
            InitialKind::TaylorGreen => {
                if self.dim != 2 {
                    bail!("the Taylor-Green datum is two-dimensional");
                }
                taylor_green(&grid, self.initial.amplitude)
            }
            InitialKind::Random => {
                let u = random_field(&grid, self.initial.decay, &mut ChaCha8Rng::seed_from_u64(self.seed));
                let n = sobolev_norm(&op, 0.5, &u)?;
                u.scaled(if n > 0.0 { self.initial.amplitude / n } else { 0.0 })
            }
        };
        let history = HistorySegment::constant(self.delay_r, u0.clone())?;
        let f = &self.force;
        let mut force = match f.kind {
            ForceKind::PointDelay => DelayedForce::point(f.kappa),
            ForceKind::DistributedDelay => {
                let w = f.weights.clone().unwrap_or_else(|| vec![1.0 / self.delay_r; 11]);
                DelayedForce::distributed(f.kappa, w, self.delay_r)?
            }
            ForceKind::ModulatedPointDelay => DelayedForce::modulated(
                f.kappa,
                Modulation { mean: 1.0, amplitude: f.modulation_amplitude, frequency: f.modulation_frequency },
                f.p,
            ),
        };
        if let Some(lf) = f.lf {
            force = force.with_declared_lipschitz(lf)?;
        }
        Ok(Problem { op, u0, history, force, solver: self.solver_config()? })
    }
}
