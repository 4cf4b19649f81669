use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::solops::b3_sharp;
use crate::specfun::FractionalOrder;

/// Empirical constants feeding the contraction bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonitorConstants {
    /// bilinear constant: `||A^{-1/4} F u|| <= c1 ||A^{1/2} u||^2`
    pub c1: f64,
    /// `B3` at `beta = 1/2`
    pub b3_half: f64,
    /// `B3` at `beta = 3/4`
    pub b3_three_quarter: f64,
}

impl MonitorConstants {
    /// Uses the sharp diagonal `B3` values for this order.
    pub fn with_sharp_b3(alpha: FractionalOrder, c1: f64) -> Result<Self> {
        Ok(Self {
            c1,
            b3_half: b3_sharp(alpha, 0.5)?,
            b3_three_quarter: b3_sharp(alpha, 0.75)?,
        })
    }
}

/// The contraction constant of the fixed-point map on `[0, t]`:
///
/// `M(t) = 2 (R + ||phi||) c1 B3(3/4) (4/alpha) t^{alpha/4} + B3(1/2) L_f (2/alpha) t^{alpha/2}`.
///
/// The first term is dropped for linear runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContractionMonitor {
    pub alpha: f64,
    pub constants: MonitorConstants,
    pub radius: f64,
    pub phi_norm: f64,
    pub lipschitz: f64,
    pub nonlinear: bool,
}

impl ContractionMonitor {
    pub fn nonlinear_part(&self, t: f64) -> f64 {
        if !self.nonlinear {
            return 0.0;
        }
        let a = self.alpha;
        2.0 * (self.radius + self.phi_norm)
            * self.constants.c1
            * self.constants.b3_three_quarter
            * (4.0 / a)
            * t.powf(a / 4.0)
    }

    pub fn force_part(&self, t: f64) -> f64 {
        let a = self.alpha;
        self.constants.b3_half * self.lipschitz * (2.0 / a) * t.powf(a / 2.0)
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.nonlinear_part(t) + self.force_part(t)
    }

    /// Largest horizon with `M(t) < target` (bisection; `M` is increasing).
    pub fn horizon_for(&self, target: f64) -> f64 {
        if self.eval(1.0) == 0.0 {
            return f64::INFINITY;
        }
        let (mut lo, mut hi) = (0.0, 1.0);
        while self.eval(hi) < target {
            lo = hi;
            hi *= 2.0;
            if hi > 1e300 {
                return f64::INFINITY;
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.eval(mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }
}

pub fn contraction_monitor(monitor: &ContractionMonitor, t: f64) -> f64 {
    monitor.eval(t)
}

/// Continuation verdict.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Verdict {
    Continue,
    /// the watched norm left `[0, threshold]` (or became non-finite) at `t_max`
    Halt { t_max: f64, norm: f64 },
}

impl Verdict {
    pub fn is_halt(&self) -> bool {
        matches!(self, Verdict::Halt { .. })
    }
}

/// Verdict for the latest node `(t, norm)`.
pub fn blowup_monitor(t: f64, norm: f64, threshold: f64) -> Verdict {
    if !norm.is_finite() || norm > threshold {
        Verdict::Halt { t_max: t, norm }
    } else {
        Verdict::Continue
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn monitor(lf: f64) -> ContractionMonitor {
        ContractionMonitor {
            alpha: 0.5,
            constants: MonitorConstants { c1: 0.3, b3_half: 0.4, b3_three_quarter: 0.5 },
            radius: 1.0,
            phi_norm: 1.0,
            lipschitz: lf,
            nonlinear: true,
        }
    }

    #[test]
    fn vanishes_at_zero_and_scales() {
        let m = monitor(2.0);
        assert_eq!(m.eval(0.0), 0.0);
        let r = m.nonlinear_part(0.2) / m.nonlinear_part(0.1);
        assert!((r - 2f64.powf(0.125)).abs() < 1e-14);
    }

    #[test]
    fn half_at_the_horizon() {
        let m = monitor(0.0);
        let t = m.horizon_for(0.5);
        assert!((contraction_monitor(&m, t) - 0.5).abs() < 1e-12);
        let lin = ContractionMonitor { nonlinear: false, ..m };
        assert_eq!(lin.eval(3.0), 0.0);
        assert_eq!(lin.horizon_for(0.5), f64::INFINITY);
    }

    #[test]
    fn verdicts() {
        assert_eq!(blowup_monitor(1.0, 5.0, 10.0), Verdict::Continue);
        assert!(blowup_monitor(1.0, 50.0, 10.0).is_halt());
        assert!(blowup_monitor(1.0, f64::NAN, 10.0).is_halt());
    }
}
