use serde::{Deserialize, Serialize};

use super::history::HistorySegment;
use crate::error::{Error, Result};
use crate::spectral::{leray_project, SpectralField};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ForceKind {
    /// `kappa u(t - r)`
    PointDelay,
    /// `kappa int_{-r}^0 w(theta) u(t + theta) dtheta`
    DistributedDelay,
    /// `omega(t) kappa u(t - r)`
    ModulatedPointDelay,
}

/// Continuous modulation `omega(t) = mean + amplitude cos(frequency t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Modulation {
    pub mean: f64,
    pub amplitude: f64,
    pub frequency: f64,
}

impl Modulation {
    pub const ONE: Modulation = Modulation { mean: 1.0, amplitude: 0.0, frequency: 0.0 };

    pub fn eval(&self, t: f64) -> f64 {
        self.mean + self.amplitude * (self.frequency * t).cos()
    }

    pub fn sup(&self) -> f64 {
        self.mean.abs() + self.amplitude.abs()
    }
}

/// Time profile of an additive, state-independent source term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Profile {
    Constant,
    Sine { frequency: f64 },
    Cosine { frequency: f64 },
}

impl Profile {
    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            Profile::Constant => 1.0,
            Profile::Sine { frequency } => (frequency * t).sin(),
            Profile::Cosine { frequency } => (frequency * t).cos(),
        }
    }
}

/// Delayed forcing `f(t, u_t)` plus an optional source `p(t) g`.
#[derive(Debug, Clone, PartialEq)]
pub struct DelayedForce {
    kind: ForceKind,
    kappa: f64,
    /// samples of `w` on a uniform grid of `[-r, 0]` (distributed kind only)
    weights: Vec<f64>,
    modulation: Modulation,
    /// exponent of the `L^p_loc` class declared for `omega`
    declared_p: f64,
    lipschitz: f64,
    source: Option<(Profile, SpectralField)>,
}

impl DelayedForce {
    pub fn point(kappa: f64) -> Self {
        Self {
            kind: ForceKind::PointDelay,
            kappa,
            weights: Vec::new(),
            modulation: Modulation::ONE,
            declared_p: f64::INFINITY,
            lipschitz: kappa.abs(),
            source: None,
        }
    }

    pub fn none() -> Self {
        Self::point(0.0)
    }

    pub fn distributed(kappa: f64, weights: Vec<f64>, delay_r: f64) -> Result<Self> {
        if weights.len() < 2 {
            return Err(Error::Domain("distributed kernel needs >= 2 weight samples".into()));
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::Domain("kernel weights must be finite".into()));
        }
        let mut f = Self::point(kappa);
        f.kind = ForceKind::DistributedDelay;
        f.weights = weights;
        f.lipschitz = kappa.abs() * f.kernel_l1(delay_r);
        Ok(f)
    }

    pub fn modulated(kappa: f64, modulation: Modulation, declared_p: f64) -> Self {
        let mut f = Self::point(kappa);
        f.kind = ForceKind::ModulatedPointDelay;
        f.modulation = modulation;
        f.declared_p = declared_p;
        f.lipschitz = kappa.abs() * modulation.sup();
        f
    }

    /// Adds a state-independent source `p(t) g` (projected onto divergence-free fields).
    pub fn with_source(mut self, profile: Profile, g: SpectralField) -> Result<Self> {
        let g = match g.grid() {
            Some(grid) => leray_project(grid, g.coeffs())?,
            None => g,
        };
        self.source = Some((profile, g));
        Ok(self)
    }

    /// Overrides the Lipschitz constant used by the contraction monitor; it may not
    /// understate the built-in one.
    pub fn with_declared_lipschitz(mut self, l_f: f64) -> Result<Self> {
        if l_f + 1e-12 < self.lipschitz {
            return Err(Error::Config(format!(
                "declared Lipschitz constant {l_f} is below the force's actual constant {}",
                self.lipschitz
            )));
        }
        self.lipschitz = l_f;
        Ok(self)
    }

    pub fn kind(&self) -> ForceKind {
        self.kind
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    pub fn declared_p(&self) -> f64 {
        self.declared_p
    }

    pub fn has_source(&self) -> bool {
        self.source.is_some()
    }

    /// True when the force ignores the state (possibly apart from the source).
    pub fn is_state_free(&self) -> bool {
        self.kappa == 0.0
    }

    fn kernel_l1(&self, delay_r: f64) -> f64 {
        let h = delay_r / (self.weights.len() - 1) as f64;
        trapezoid_weights(self.weights.len(), h)
            .zip(&self.weights)
            .map(|(q, w)| q * w.abs())
            .sum()
    }

    fn omega(&self, t: f64) -> f64 {
        match self.kind {
            ForceKind::ModulatedPointDelay => self.modulation.eval(t),
            _ => 1.0,
        }
    }

    /// `(time, coefficient)` pairs whose weighted sum of `u` values is the state part.
    fn taps(&self, t: f64, delay_r: f64) -> Vec<(f64, f64)> {
        match self.kind {
            ForceKind::PointDelay | ForceKind::ModulatedPointDelay => {
                vec![(t - delay_r, self.kappa * self.omega(t))]
            }
            ForceKind::DistributedDelay => {
                let m = self.weights.len() - 1;
                let h = delay_r / m as f64;
                trapezoid_weights(m + 1, h)
                    .zip(&self.weights)
                    .enumerate()
                    .map(|(j, (q, w))| (t - delay_r + j as f64 * h, self.kappa * q * w))
                    .collect()
            }
        }
    }

    /// Sensitivity of `f(t, u_t)` to the newest node: the force's Lipschitz constant
    /// restricted to the panel `(t_last, t]`.
    pub fn head_lipschitz(&self, t: f64, history: &HistorySegment) -> f64 {
        if self.kappa == 0.0 {
            return 0.0;
        }
        self.taps(t, history.delay_r())
            .iter()
            .map(|&(s, c)| c.abs() * history.head_weight(s, t))
            .sum()
    }
}

fn trapezoid_weights(n: usize, h: f64) -> impl Iterator<Item = f64> {
    (0..n).map(move |j| if j == 0 || j + 1 == n { 0.5 * h } else { h })
}

/// `P f(t, u_t)`, with the newest node optionally replaced by a tentative value `head`.
pub fn evaluate_force_with_head(
    force: &DelayedForce,
    t: f64,
    history: &HistorySegment,
    head: Option<&SpectralField>,
) -> Result<SpectralField> {
    let mut out = SpectralField::zeros(history.shape());
    if force.kappa != 0.0 {
        for (s, c) in force.taps(t, history.delay_r()) {
            if c == 0.0 {
                continue;
            }
            let u = history.value_with_head(s, head.map(|v| (t, v)))?;
            out.add_scaled(c, &u)?;
        }
    }
    if let Some((profile, g)) = &force.source {
        out.add_scaled(profile.eval(t), g)?;
    }
    match out.grid() {
        Some(grid) => leray_project(grid, out.coeffs()),
        None => Ok(out),
    }
}

/// `P f(t, u_t)` from a history covering `[t - r, t]`.
pub fn evaluate_force(force: &DelayedForce, t: f64, history: &HistorySegment) -> Result<SpectralField> {
    evaluate_force_with_head(force, t, history, None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar(v: f64) -> SpectralField {
        SpectralField::diagonal(&[v])
    }

    #[test]
    fn worked_examples() {
        let h = HistorySegment::constant(0.5, scalar(3.0)).unwrap();
        assert_eq!(evaluate_force(&DelayedForce::none(), 0.0, &h).unwrap().norm(), 0.0);
        let v = evaluate_force(&DelayedForce::point(2.0), 0.0, &h).unwrap();
        assert_eq!(v.coeffs()[0].re, 6.0);
        let avg = DelayedForce::distributed(1.0, vec![2.0; 11], 0.5).unwrap();
        let v = evaluate_force(&avg, 0.0, &h).unwrap();
        assert!((v.coeffs()[0].re - 3.0).abs() < 1e-14);
        assert!((avg.lipschitz() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn point_delay_reads_the_lagged_value() {
        let h = HistorySegment::from_fn(1.0, 10, |t| scalar(t * t)).unwrap();
        let v = evaluate_force(&DelayedForce::point(1.0), 0.0, &h).unwrap();
        assert!((v.coeffs()[0].re - 1.0).abs() < 1e-14);
        let m = DelayedForce::modulated(2.0, Modulation { mean: 1.0, amplitude: 0.5, frequency: 0.0 }, 8.0);
        let v = evaluate_force(&m, 0.0, &h).unwrap();
        assert!((v.coeffs()[0].re - 3.0).abs() < 1e-14);
        assert_eq!(m.lipschitz(), 3.0);
    }

    #[test]
    fn head_sensitivity() {
        let mut h = HistorySegment::constant(0.05, scalar(1.0)).unwrap();
        h.push(0.1, scalar(1.0)).unwrap();
        let f = DelayedForce::point(4.0);
        // u(0.2 - 0.05) sits halfway into the panel (0.1, 0.2]
        assert!((f.head_lipschitz(0.2, &h) - 2.0).abs() < 1e-12);
        let mut long = HistorySegment::constant(0.15, scalar(1.0)).unwrap();
        long.push(0.1, scalar(1.0)).unwrap();
        assert_eq!(f.head_lipschitz(0.2, &long), 0.0);
        let head = scalar(3.0);
        let v = evaluate_force_with_head(&f, 0.2, &h, Some(&head)).unwrap();
        assert!((v.coeffs()[0].re - 8.0).abs() < 1e-12);
    }

    #[test]
    fn sources_and_declared_constants() {
        let h = HistorySegment::constant(0.5, scalar(0.0)).unwrap();
        let f = DelayedForce::none()
            .with_source(Profile::Sine { frequency: 2.0 }, scalar(1.0))
            .unwrap();
        let v = evaluate_force(&f, 0.3, &h).unwrap();
        assert!((v.coeffs()[0].re - 0.6f64.sin()).abs() < 1e-15);
        assert!(DelayedForce::point(2.0).with_declared_lipschitz(1.0).is_err());
        assert_eq!(DelayedForce::point(2.0).with_declared_lipschitz(3.0).unwrap().lipschitz(), 3.0);
    }
}
