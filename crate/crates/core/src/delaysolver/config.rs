use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::FractionalOrder;

/// Time mesh on `[0, t_end]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Mesh {
    Uniform,
    /// `t_j = t_end (j / n)^gamma`, `gamma >= 1`
    Graded { gamma: f64 },
}

impl Mesh {
    /// `gamma = 1` is the uniform mesh.
    pub fn from_gamma(gamma: f64) -> Result<Self> {
        if !(gamma >= 1.0) || !gamma.is_finite() {
            return Err(Error::Config(format!("mesh.gamma must be >= 1, got {gamma}")));
        }
        Ok(if gamma == 1.0 { Mesh::Uniform } else { Mesh::Graded { gamma } })
    }

    pub fn gamma(&self) -> f64 {
        match *self {
            Mesh::Uniform => 1.0,
            Mesh::Graded { gamma } => gamma,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub alpha: FractionalOrder,
    pub t_end: f64,
    pub n_steps: usize,
    pub mesh: Mesh,
    pub picard_tol: f64,
    pub picard_max_iters: usize,
    pub blowup_threshold: f64,
    /// exponent of the norm watched by the blow-up monitor (1/2 or 3/4)
    pub half_norm_beta: f64,
    /// include the advection term `F u`
    pub nonlinear: bool,
    /// record a violation whenever `||u(t) - phi(0)||_{D(A^{1/2})}` leaves the R-ball
    pub strict_ball: bool,
}

impl SolverConfig {
    pub fn new(alpha: FractionalOrder, t_end: f64, n_steps: usize) -> Self {
        Self {
            alpha,
            t_end,
            n_steps,
            mesh: Mesh::Uniform,
            picard_tol: 1e-12,
            picard_max_iters: 50,
            blowup_threshold: 1e8,
            half_norm_beta: 0.5,
            nonlinear: true,
            strict_ball: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if !(self.t_end > 0.0) || !self.t_end.is_finite() {
            return bad(format!("t_end must be positive, got {}", self.t_end));
        }
        if self.n_steps < 2 {
            return bad(format!("n_steps must be >= 2, got {}", self.n_steps));
        }
        Mesh::from_gamma(self.mesh.gamma())?;
        if !(self.picard_tol > 0.0) {
            return bad(format!("picard.tol must be positive, got {}", self.picard_tol));
        }
        if self.picard_max_iters == 0 {
            return bad("picard.max_iters must be >= 1".into());
        }
        if !(self.blowup_threshold > 0.0) {
            return bad(format!("blowup.threshold must be positive, got {}", self.blowup_threshold));
        }
        if self.half_norm_beta != 0.5 && self.half_norm_beta != 0.75 {
            return bad(format!("half_norm_beta must be 0.5 or 0.75, got {}", self.half_norm_beta));
        }
        Ok(())
    }

    /// Mesh nodes `t_0 = 0 < t_1 < ... < t_n = t_end`.
    pub fn nodes(&self) -> Vec<f64> {
        let n = self.n_steps as f64;
        let g = self.mesh.gamma();
        (0..=self.n_steps)
            .map(|j| {
                if j == self.n_steps {
                    self.t_end
                } else {
                    self.t_end * (j as f64 / n).powf(g)
                }
            })
            .collect()
    }
}
