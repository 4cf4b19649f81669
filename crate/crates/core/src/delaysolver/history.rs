use crate::error::{Error, Result};
use crate::spectral::{FieldShape, SpectralField, SpectralOperator, sobolev_norm};

/// Slack for deciding whether a query time is covered.
const TIME_EPS: f64 = 1e-12;

/// Sampled trajectory, piecewise linear in coefficient space.
///
/// Built from the initial datum on `[-r, 0]` and extended node by node as the solver
/// advances, so it always covers `[t_now - r, t_now]`.
#[derive(Debug, Clone, PartialEq)]
pub struct HistorySegment {
    delay_r: f64,
    times: Vec<f64>,
    fields: Vec<SpectralField>,
}

impl HistorySegment {
    /// Samples `phi` at `n_samples + 1` uniform points of `[-r, 0]`.
    pub fn from_fn(delay_r: f64, n_samples: usize, phi: impl Fn(f64) -> SpectralField) -> Result<Self> {
        if !(delay_r > 0.0) {
            return Err(Error::Domain(format!("delay must be positive, got {delay_r}")));
        }
        let n = n_samples.max(1);
        let times: Vec<f64> = (0..=n).map(|i| -delay_r + delay_r * i as f64 / n as f64).collect();
        let fields = times.iter().map(|&t| phi(t)).collect();
        Self::new(delay_r, times, fields)
    }

    /// Constant history `phi(theta) = u0`.
    pub fn constant(delay_r: f64, u0: SpectralField) -> Result<Self> {
        Self::new(delay_r, vec![-delay_r, 0.0], vec![u0.clone(), u0])
    }

    pub fn new(delay_r: f64, times: Vec<f64>, fields: Vec<SpectralField>) -> Result<Self> {
        if !(delay_r > 0.0) {
            return Err(Error::Domain(format!("delay must be positive, got {delay_r}")));
        }
        if times.len() != fields.len() || times.len() < 2 {
            return Err(Error::InvalidSamples(format!(
                "history needs >= 2 samples with matching fields ({} times, {} fields)",
                times.len(),
                fields.len()
            )));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidSamples("history times must be strictly increasing".into()));
        }
        let (first, last) = (times[0], *times.last().unwrap());
        if first > last - delay_r + TIME_EPS {
            return Err(Error::HistoryGap {
                t: last - delay_r,
                available_from: first,
            });
        }
        let shape = fields[0].shape();
        if fields.iter().any(|f| f.shape() != shape) {
            return Err(Error::GridMismatch("history fields live on different grids".into()));
        }
        Ok(Self { delay_r, times, fields })
    }

    pub fn delay_r(&self) -> f64 {
        self.delay_r
    }

    pub fn shape(&self) -> FieldShape {
        self.fields[0].shape()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn fields(&self) -> &[SpectralField] {
        &self.fields
    }

    pub fn t_now(&self) -> f64 {
        *self.times.last().unwrap()
    }

    pub fn latest(&self) -> &SpectralField {
        self.fields.last().unwrap()
    }

    pub fn push(&mut self, t: f64, u: SpectralField) -> Result<()> {
        if !(t > self.t_now()) {
            return Err(Error::InvalidSamples(format!(
                "history must advance: {t} after {}",
                self.t_now()
            )));
        }
        self.latest().check_shape(&u)?;
        self.times.push(t);
        self.fields.push(u);
        Ok(())
    }

    /// `u(t)` by linear interpolation.
    pub fn value_at(&self, t: f64) -> Result<SpectralField> {
        self.value_with_head(t, None)
    }

    /// `u(t)` where the trajectory is extended by a tentative node `head = (t_head, v)`.
    pub fn value_with_head(&self, t: f64, head: Option<(f64, &SpectralField)>) -> Result<SpectralField> {
        let t_last = self.t_now();
        if let Some((th, v)) = head {
            if t > t_last + TIME_EPS {
                if t > th + TIME_EPS {
                    return Err(Error::HistoryGap { t, available_from: self.times[0] });
                }
                let w = ((t - t_last) / (th - t_last)).clamp(0.0, 1.0);
                return self.latest().lerp(v, w);
            }
        }
        if t < self.times[0] - TIME_EPS || t > t_last + TIME_EPS {
            return Err(Error::HistoryGap { t, available_from: self.times[0] });
        }
        let t = t.clamp(self.times[0], t_last);
        let i = self.times.partition_point(|&s| s <= t);
        if i == 0 {
            return Ok(self.fields[0].clone());
        }
        if i == self.times.len() {
            return Ok(self.latest().clone());
        }
        let (t0, t1) = (self.times[i - 1], self.times[i]);
        let w = (t - t0) / (t1 - t0);
        if w == 0.0 {
            return Ok(self.fields[i - 1].clone());
        }
        self.fields[i - 1].lerp(&self.fields[i], w)
    }

    /// Interpolation weight that the tentative head receives at time `t`, i.e. the
    /// sensitivity of `u(t)` to the newest node.
    pub fn head_weight(&self, t: f64, t_head: f64) -> f64 {
        let t_last = self.t_now();
        if t <= t_last {
            0.0
        } else {
            ((t - t_last) / (t_head - t_last)).clamp(0.0, 1.0)
        }
    }

    /// `sup_{theta in [-r, 0]} ||u(t_now + theta)||_{D(A^beta)}` over samples: the
    /// `Y_beta` norm of the segment.
    pub fn segment_norm(&self, op: &SpectralOperator, beta: f64) -> Result<f64> {
        let from = self.t_now() - self.delay_r - TIME_EPS;
        let mut sup: f64 = 0.0;
        for (t, f) in self.times.iter().zip(&self.fields) {
            if *t >= from {
                sup = sup.max(sobolev_norm(op, beta, f)?);
            }
        }
        Ok(sup)
    }

    /// Keeps only samples needed to cover `[t_now - r, t_now]`.
    pub fn window(&self) -> Self {
        let from = self.t_now() - self.delay_r;
        let start = self.times.partition_point(|&s| s <= from).saturating_sub(1);
        Self {
            delay_r: self.delay_r,
            times: self.times[start..].to_vec(),
            fields: self.fields[start..].to_vec(),
        }
    }

    /// Shifts all times by `-offset` (the restart at `t = offset` becomes `t = 0`).
    pub fn shifted(&self, offset: f64) -> Self {
        Self {
            delay_r: self.delay_r,
            times: self.times.iter().map(|t| t - offset).collect(),
            fields: self.fields.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar(v: f64) -> SpectralField {
        SpectralField::diagonal(&[v])
    }

    #[test]
    fn interpolates_linearly() {
        let h = HistorySegment::from_fn(1.0, 4, |t| scalar(2.0 * t)).unwrap();
        assert_eq!(h.value_at(-0.6).unwrap().coeffs()[0].re, -1.2);
        assert_eq!(h.value_at(-1.0).unwrap().coeffs()[0].re, -2.0);
        assert_eq!(h.value_at(0.0).unwrap().coeffs()[0].re, 0.0);
        assert!(matches!(h.value_at(-1.5), Err(Error::HistoryGap { .. })));
        assert!(matches!(h.value_at(0.1), Err(Error::HistoryGap { .. })));
    }

    #[test]
    fn tentative_head_extends_the_trajectory() {
        let mut h = HistorySegment::constant(0.5, scalar(1.0)).unwrap();
        h.push(0.2, scalar(3.0)).unwrap();
        let head = scalar(5.0);
        let v = h.value_with_head(0.3, Some((0.4, &head))).unwrap();
        assert!((v.coeffs()[0].re - 4.0).abs() < 1e-15);
        assert!((h.head_weight(0.3, 0.4) - 0.5).abs() < 1e-15);
        assert_eq!(h.head_weight(0.1, 0.4), 0.0);
        assert!(h.value_with_head(0.5, Some((0.4, &head))).is_err());
        assert!(h.push(0.1, scalar(0.0)).is_err());
    }

    #[test]
    fn rejects_short_coverage() {
        let r = HistorySegment::new(1.0, vec![-0.5, 0.0], vec![scalar(0.0), scalar(0.0)]);
        assert!(matches!(r, Err(Error::HistoryGap { .. })));
    }

    #[test]
    fn window_keeps_the_delay_interval() {
        let mut h = HistorySegment::constant(0.3, scalar(1.0)).unwrap();
        for i in 1..=10 {
            h.push(0.1 * i as f64, scalar(i as f64)).unwrap();
        }
        let w = h.window();
        assert!(w.times()[0] <= 1.0 - 0.3 + 1e-12);
        assert!(w.times().len() <= 5);
        assert_eq!(w.value_at(0.75).unwrap(), h.value_at(0.75).unwrap());
        let s = w.shifted(1.0);
        assert_eq!(s.t_now(), 0.0);
    }
}
