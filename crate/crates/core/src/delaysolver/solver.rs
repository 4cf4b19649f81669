use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::io::Write;

use super::config::{Mesh, SolverConfig};
use super::force::{evaluate_force_with_head, DelayedForce, ForceKind};
use super::history::HistorySegment;
use super::monitor::{blowup_monitor, ContractionMonitor, MonitorConstants, Verdict};
use crate::error::{Error, Result};
use crate::solops::{kernel_mass, symbol_s};
use crate::spectral::{sobolev_norm, Advection, SpectralField, SpectralOperator};

/// Coefficients per parallel work unit of the history sums.
const CHUNK: usize = 512;

/// Diagnostics of one accepted node.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepRecord {
    pub t: f64,
    pub l2_norm: f64,
    pub half_norm: f64,
    pub three_quarter_norm: f64,
    pub picard_iters: usize,
    /// largest observed ratio of successive Picard differences (0 for affine panels)
    pub picard_ratio: f64,
    /// Lipschitz bound of the panel map in `D(A^{1/2})`
    pub predicted_ratio: f64,
    /// contraction constant `M(t)`
    pub contraction_m: f64,
    pub outside_ball: bool,
}

/// Everything needed to continue a run: the trajectory and the integrand history.
#[derive(Debug, Clone, PartialEq)]
pub struct RunState {
    pub history: HistorySegment,
    /// `g_j = F u_j + P f(t_j, u_{t_j})` for `j = 1..=step`
    pub integrands: Vec<SpectralField>,
    pub records: Vec<StepRecord>,
    pub verdict: Verdict,
}

impl RunState {
    /// Index of the last accepted node.
    pub fn step(&self) -> usize {
        self.records.len() - 1
    }

    pub fn t_now(&self) -> f64 {
        self.history.t_now()
    }

    pub fn u_now(&self) -> &SpectralField {
        self.history.latest()
    }

    pub fn monitor_warnings(&self) -> usize {
        self.records.iter().filter(|r| r.contraction_m >= 1.0).count()
    }

    pub fn max_contraction(&self) -> f64 {
        self.records.iter().map(|r| r.contraction_m).fold(0.0, f64::max)
    }

    /// Trajectory CSV: `t, ||u||, ||u||_{1/2}, ||u||_{3/4}, Picard iterations, M`.
    pub fn write_trajectory_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let mut s = String::from(
            "t,l2_norm,half_norm,three_quarter_norm,picard_iters,picard_ratio,predicted_ratio,contraction_m\n",
        );
        for r in &self.records {
            s.push_str(&format!(
                "{:.17e},{:.17e},{:.17e},{:.17e},{},{:.17e},{:.17e},{:.17e}\n",
                r.t,
                r.l2_norm,
                r.half_norm,
                r.three_quarter_norm,
                r.picard_iters,
                r.picard_ratio,
                r.predicted_ratio,
                r.contraction_m
            ));
        }
        w.write_all(s.as_bytes())?;
        Ok(())
    }
}

/// Result of resolving the newest panel.
#[derive(Debug, Clone)]
pub struct PicardOutcome {
    pub u: SpectralField,
    pub integrand: SpectralField,
    pub iterations: usize,
    pub max_ratio: f64,
    /// `||v_{k+1} - v_k||_{D(A^{1/2})}` per iteration
    pub residuals: Vec<f64>,
    /// largest `||v_k||_{D(A^{1/2})}` seen
    pub max_half_norm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RunSummary {
    pub steps: usize,
    pub t_final: f64,
    pub verdict: Verdict,
    pub max_contraction: f64,
    pub monitor_warnings: usize,
    pub ball_violations: usize,
}

/// Product-integration solver of
/// `u(t) = S(t) phi(0) + int_0^t T(t - s) [F u(s) + P f(s, u_s)] ds`.
///
/// On each panel `[t_i, t_{i+1}]` the integrand is frozen at its right endpoint and
/// the kernel is integrated exactly, `int T = M(t_n - t_i) - M(t_n - t_{i+1})` with
/// `M(h) = h^alpha E_{alpha,alpha+1}(-lambda h^alpha)`. The newest panel's integrand
/// depends on the unknown `u_n` and is resolved by Picard iteration.
pub struct Solver {
    config: SolverConfig,
    op: SpectralOperator,
    force: DelayedForce,
    advection: Option<Advection>,
    monitor: ContractionMonitor,
    phi0: SpectralField,
    nodes: Vec<f64>,
    lambdas: Vec<f64>,
    /// coefficient -> index into `lambdas` (`None` for the inert mean mode)
    slot: Vec<Option<usize>>,
    /// uniform mesh: `mass[m * E + e] = M_e(m h)`
    mass: Option<Vec<f64>>,
    state: RunState,
}

impl Solver {
    /// `history` holds `phi` on `[-r, 0]`; the radius of the contraction monitor
    /// defaults to `||phi||_{Y_{1/2}}`.
    pub fn new(
        config: SolverConfig,
        op: SpectralOperator,
        force: DelayedForce,
        history: HistorySegment,
        constants: MonitorConstants,
    ) -> Result<Self> {
        config.validate()?;
        if history.t_now() != 0.0 {
            return Err(Error::Config(format!("initial history must end at t = 0, got {}", history.t_now())));
        }
        let phi0 = history.latest().clone();
        let u0 = phi0.clone();
        let mut solver = Self::build(config, op, force, history.clone(), constants, phi0)?;
        let record = solver.record(0.0, &u0, 0, 0.0, 0.0)?;
        solver.state = RunState {
            history,
            integrands: Vec::new(),
            records: vec![record],
            verdict: Verdict::Continue,
        };
        Ok(solver)
    }

    /// Continues from a saved state produced by a solver with the same setup.
    pub fn resume(
        config: SolverConfig,
        op: SpectralOperator,
        force: DelayedForce,
        constants: MonitorConstants,
        phi0: SpectralField,
        state: RunState,
    ) -> Result<Self> {
        config.validate()?;
        let nodes = config.nodes();
        let n = state.step();
        if n >= nodes.len() || state.integrands.len() != n || (state.t_now() - nodes[n]).abs() > 1e-12 * nodes[n].max(1.0) {
            return Err(Error::Config("saved state does not lie on this configuration's mesh".into()));
        }
        let mut solver = Self::build(config, op, force, state.history.clone(), constants, phi0)?;
        solver.state = state;
        Ok(solver)
    }

    fn build(
        config: SolverConfig,
        op: SpectralOperator,
        force: DelayedForce,
        history: HistorySegment,
        constants: MonitorConstants,
        phi0: SpectralField,
    ) -> Result<Self> {
        op.check(&phi0)?;
        let alpha = config.alpha.value();
        if force.kind() == ForceKind::ModulatedPointDelay && !(force.declared_p() > 2.0 / alpha) {
            return Err(Error::Config(format!(
                "modulation class p = {} must exceed 2/alpha = {}",
                force.declared_p(),
                2.0 / alpha
            )));
        }
        let advection = if config.nonlinear {
            match op.shape().grid() {
                Some(g) => Some(Advection::new(*g)),
                None => return Err(Error::Config("the advection term needs a Fourier grid".into())),
            }
        } else {
            None
        };
        let mut lambdas: Vec<f64> = op.eigenvalues().iter().copied().filter(|&l| l > 0.0).collect();
        lambdas.sort_by(f64::total_cmp);
        lambdas.dedup();
        let slot = op
            .eigenvalues()
            .iter()
            .map(|&l| (l > 0.0).then(|| lambdas.partition_point(|&x| x < l)))
            .collect();
        let nodes = config.nodes();
        let mass = match config.mesh {
            Mesh::Uniform => {
                let h = config.t_end / config.n_steps as f64;
                let mut table = Vec::with_capacity((config.n_steps + 1) * lambdas.len());
                for m in 0..=config.n_steps {
                    for &l in &lambdas {
                        table.push(kernel_mass(config.alpha, l, m as f64 * h)?);
                    }
                }
                Some(table)
            }
            Mesh::Graded { .. } => None,
        };
        // ||phi||_{Y_{1/2}} from the initial segment, also when resuming
        let r = history.delay_r();
        let mut phi_norm: f64 = 0.0;
        for (t, f) in history.times().iter().zip(history.fields()) {
            if *t <= 0.0 && *t >= -r - 1e-12 {
                phi_norm = phi_norm.max(sobolev_norm(&op, 0.5, f)?);
            }
        }
        let monitor = ContractionMonitor {
            alpha,
            constants,
            radius: phi_norm,
            phi_norm,
            lipschitz: force.lipschitz(),
            nonlinear: config.nonlinear,
        };
        let placeholder = RunState {
            history,
            integrands: Vec::new(),
            records: Vec::new(),
            verdict: Verdict::Continue,
        };
        Ok(Self {
            config,
            op,
            force,
            advection,
            monitor,
            phi0,
            nodes,
            lambdas,
            slot,
            mass,
            state: placeholder,
        })
    }

    /// Overrides the R-ball radius of the contraction monitor.
    pub fn set_radius(&mut self, radius: f64) -> Result<()> {
        if !(radius >= 0.0) {
            return Err(Error::Config(format!("radius must be >= 0, got {radius}")));
        }
        self.monitor.radius = radius;
        Ok(())
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    pub fn monitor(&self) -> &ContractionMonitor {
        &self.monitor
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn phi0(&self) -> &SpectralField {
        &self.phi0
    }

    pub fn state(&self) -> &RunState {
        &self.state
    }

    pub fn into_state(self) -> RunState {
        self.state
    }

    pub fn is_finished(&self) -> bool {
        self.state.step() >= self.config.n_steps || self.state.verdict.is_halt()
    }

    fn record(&self, t: f64, u: &SpectralField, iters: usize, ratio: f64, predicted: f64) -> Result<StepRecord> {
        let half = sobolev_norm(&self.op, 0.5, u)?;
        let outside_ball = self.config.strict_ball && {
            let d = u.sub(&self.phi0)?;
            sobolev_norm(&self.op, 0.5, &d)? > self.monitor.radius
        };
        Ok(StepRecord {
            t,
            l2_norm: u.norm(),
            half_norm: half,
            three_quarter_norm: sobolev_norm(&self.op, 0.75, u)?,
            picard_iters: iters,
            picard_ratio: ratio,
            predicted_ratio: predicted,
            contraction_m: self.monitor.eval(t),
            outside_ball,
        })
    }

    /// `M_e(t_n - t_i) - M_e(t_n - t_{i+1})` laid out as `[i * E + e]`, `i < n`.
    fn panel_weights(&self, n: usize) -> Result<Vec<f64>> {
        let ne = self.lambdas.len();
        let mut w = vec![0.0; n * ne];
        match &self.mass {
            Some(mass) => {
                for i in 0..n {
                    let (far, near) = (n - i, n - i - 1);
                    for e in 0..ne {
                        w[i * ne + e] = mass[far * ne + e] - mass[near * ne + e];
                    }
                }
            }
            None => {
                let t = self.nodes[n];
                let alpha = self.config.alpha;
                let mut prev: Vec<f64> = self
                    .lambdas
                    .iter()
                    .map(|&l| kernel_mass(alpha, l, t - self.nodes[0]))
                    .collect::<Result<_>>()?;
                for i in 0..n {
                    let next: Vec<f64> = self
                        .lambdas
                        .iter()
                        .map(|&l| kernel_mass(alpha, l, t - self.nodes[i + 1]))
                        .collect::<Result<_>>()?;
                    for e in 0..ne {
                        w[i * ne + e] = prev[e] - next[e];
                    }
                    prev = next;
                }
            }
        }
        Ok(w)
    }

    /// `S(t_n) phi(0) + sum_{i < n-1} W_{n,i} g_{i+1}`; each coefficient's sum runs in a
    /// fixed order, so the result does not depend on the thread count.
    fn frozen_tail(&self, n: usize, weights: &[f64]) -> Result<SpectralField> {
        let ne = self.lambdas.len();
        let t = self.nodes[n];
        let s: Vec<f64> = self
            .lambdas
            .iter()
            .map(|&l| symbol_s(self.config.alpha, l, t))
            .collect::<Result<_>>()?;
        let phi = self.phi0.coeffs();
        let g = &self.state.integrands;
        let mut out = vec![Complex64::default(); phi.len()];
        out.par_chunks_mut(CHUNK).enumerate().for_each(|(chunk, acc)| {
            let base = chunk * CHUNK;
            for (j, a) in acc.iter_mut().enumerate() {
                if let Some(e) = self.slot[base + j] {
                    *a = phi[base + j] * s[e];
                }
            }
            for i in 0..n.saturating_sub(1) {
                let gi = &g[i].coeffs()[base..base + acc.len()];
                let wi = &weights[i * ne..(i + 1) * ne];
                for (j, a) in acc.iter_mut().enumerate() {
                    if let Some(e) = self.slot[base + j] {
                        *a += gi[j] * wi[e];
                    }
                }
            }
        });
        Ok(SpectralField::from_parts(self.phi0.shape(), out))
    }

    /// `F v + P f(t, u_t)` with `v` as the tentative value at `t`.
    fn integrand(&self, t: f64, v: &SpectralField) -> Result<SpectralField> {
        let mut g = evaluate_force_with_head(&self.force, t, &self.state.history, Some(v))?;
        if let Some(adv) = &self.advection {
            g.add_scaled(1.0, &adv.apply(v)?)?;
        }
        Ok(g)
    }

    fn apply_panel(&self, frozen: &SpectralField, w_last: &[f64], g: &SpectralField) -> SpectralField {
        let coeffs = frozen
            .coeffs()
            .iter()
            .zip(g.coeffs())
            .zip(&self.slot)
            .map(|((f, gc), s)| match s {
                Some(e) => f + gc * w_last[*e],
                None => *f,
            })
            .collect();
        SpectralField::from_parts(frozen.shape(), coeffs)
    }

    /// Fixed point of `v -> frozen + W_last (F v + P f(t, history with v))`, started
    /// from the previous node. Stops when successive iterates differ by at most
    /// `picard_tol * max(1, ||v||)` in `D(A^{1/2})`.
    pub fn picard_solve(&self, t: f64, frozen: &SpectralField, w_last: &[f64]) -> Result<PicardOutcome> {
        let depends = self.advection.is_some() || self.force.head_lipschitz(t, &self.state.history) > 0.0;
        let mut v = self.state.history.latest().clone();
        let mut residuals = Vec::new();
        let mut max_ratio: f64 = 0.0;
        let mut max_half = sobolev_norm(&self.op, 0.5, &v)?;
        let mut ratio = 0.0;
        for k in 1..=self.config.picard_max_iters {
            let g = self.integrand(t, &v)?;
            let next = self.apply_panel(frozen, w_last, &g);
            if !depends {
                return Ok(PicardOutcome {
                    u: next,
                    integrand: g,
                    iterations: 1,
                    max_ratio: 0.0,
                    residuals,
                    max_half_norm: max_half,
                });
            }
            let d = sobolev_norm(&self.op, 0.5, &next.sub(&v)?)?;
            let size = sobolev_norm(&self.op, 0.5, &next)?;
            max_half = max_half.max(size);
            let scale = size.max(1.0);
            if let Some(&prev) = residuals.last() {
                // ratios of roundoff-level differences carry no information
                if prev > 1e-10 * scale {
                    ratio = d / prev;
                    max_ratio = max_ratio.max(ratio);
                }
            }
            residuals.push(d);
            v = next;
            if !d.is_finite() {
                break;
            }
            if d <= self.config.picard_tol * scale {
                let integrand = self.integrand(t, &v)?;
                return Ok(PicardOutcome {
                    u: v,
                    integrand,
                    iterations: k,
                    max_ratio,
                    residuals,
                    max_half_norm: max_half,
                });
            }
        }
        Err(Error::PicardNonConvergence {
            iterations: residuals.len(),
            ratio,
            residual: residuals.last().copied().unwrap_or(f64::NAN),
        })
    }

    /// Lipschitz bound of the panel map at `t_n` for iterates of size `rho`.
    fn predicted_ratio(&self, t: f64, w_last: &[f64], rho: f64) -> f64 {
        let force = self.force.head_lipschitz(t, &self.state.history);
        let mut sup_w: f64 = 0.0;
        let mut sup_nl: f64 = 0.0;
        for (e, &l) in self.lambdas.iter().enumerate() {
            sup_w = sup_w.max(w_last[e].abs());
            sup_nl = sup_nl.max(l.powf(0.75) * w_last[e].abs());
        }
        let nl = if self.advection.is_some() { 2.0 * self.monitor.constants.c1 * rho * sup_nl } else { 0.0 };
        nl + sup_w * force
    }

    /// Advances one node. A blow-up is recorded in the state before the error returns.
    pub fn mild_step(&mut self) -> Result<&StepRecord> {
        if self.state.verdict.is_halt() {
            return Err(Error::Config("run already halted".into()));
        }
        let n = self.state.step() + 1;
        if n > self.config.n_steps {
            return Err(Error::Config("mesh exhausted".into()));
        }
        let t = self.nodes[n];
        let weights = self.panel_weights(n)?;
        let ne = self.lambdas.len();
        let frozen = self.frozen_tail(n, &weights)?;
        let w_last = &weights[(n - 1) * ne..n * ne];
        let out = self.picard_solve(t, &frozen, w_last)?;
        let predicted = self.predicted_ratio(t, w_last, out.max_half_norm);
        let record = self.record(t, &out.u, out.iterations, out.max_ratio, predicted)?;
        let watched = if self.config.half_norm_beta == 0.5 { record.half_norm } else { record.three_quarter_norm };
        self.state.history.push(t, out.u)?;
        self.state.integrands.push(out.integrand);
        self.state.records.push(record);
        let verdict = blowup_monitor(t, watched, self.config.blowup_threshold);
        if let Verdict::Halt { t_max, norm } = verdict {
            self.state.verdict = verdict;
            return Err(Error::BlowUp { t: t_max, norm, threshold: self.config.blowup_threshold });
        }
        Ok(self.state.records.last().unwrap())
    }

    /// Advances until `t >= t_stop` (or the end of the mesh); a blow-up halt ends the
    /// run normally with the verdict recorded.
    pub fn run_until(&mut self, t_stop: f64) -> Result<RunSummary> {
        let stop = t_stop - 1e-12 * t_stop.min(f64::MAX).abs().max(1.0);
        while !self.is_finished() && self.state.t_now() < stop {
            match self.mild_step() {
                Ok(_) | Err(Error::BlowUp { .. }) => {}
                Err(e) => return Err(e),
            }
        }
        Ok(self.summary())
    }

    pub fn run(&mut self) -> Result<RunSummary> {
        self.run_until(f64::INFINITY)
    }

    pub fn summary(&self) -> RunSummary {
        RunSummary {
            steps: self.state.step(),
            t_final: self.state.t_now(),
            verdict: self.state.verdict,
            max_contraction: self.state.max_contraction(),
            monitor_warnings: self.state.monitor_warnings(),
            ball_violations: self.state.records.iter().filter(|r| r.outside_ball).count(),
        }
    }

    /// `u(t_j)` for every accepted node.
    pub fn trajectory(&self) -> Vec<(f64, SpectralField)> {
        let h = &self.state.history;
        h.times()
            .iter()
            .zip(h.fields())
            .filter(|(t, _)| **t >= 0.0)
            .map(|(t, f)| (*t, f.clone()))
            .collect()
    }
}
