//! Riemann-Liouville integral and Caputo derivative of sampled functions.
//!
//! Samples are reconstructed as continuous piecewise-linear functions and the
//! weakly singular kernels are integrated exactly against that reconstruction
//! (product trapezoid for `J^a`, the L1 scheme for the Caputo derivative).

use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use super::gamma::gamma;
use crate::error::{Error, Result};

/// Order `alpha` of a fractional operator, strictly inside `(0, 1)`.
///
/// The classical limit `alpha = 1` is available only through
/// [`FractionalOrder::classical`], for limit checks against first-order dynamics.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct FractionalOrder(f64);

impl FractionalOrder {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha > 0.0 && alpha < 1.0 {
            Ok(Self(alpha))
        } else {
            Err(Error::Domain(format!(
                "fractional order alpha must satisfy 0 < alpha < 1, got {alpha}"
            )))
        }
    }

    /// The integer-order limit `alpha = 1`.
    pub fn classical() -> Self {
        Self(1.0)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_classical(self) -> bool {
        self.0 == 1.0
    }
}

impl TryFrom<f64> for FractionalOrder {
    type Error = Error;

    fn try_from(alpha: f64) -> Result<Self> {
        if alpha == 1.0 {
            return Ok(Self::classical());
        }
        Self::new(alpha)
    }
}

impl From<FractionalOrder> for f64 {
    fn from(a: FractionalOrder) -> f64 {
        a.0
    }
}

/// Values sampled on a strictly increasing time grid starting at `0`.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledFunction<T = f64> {
    grid: Vec<f64>,
    values: Vec<T>,
}

impl<T: Copy> SampledFunction<T> {
    pub fn new(grid: Vec<f64>, values: Vec<T>) -> Result<Self> {
        if grid.len() < 2 {
            return Err(Error::InvalidSamples(format!(
                "need at least 2 grid points, got {}",
                grid.len()
            )));
        }
        if grid.len() != values.len() {
            return Err(Error::InvalidSamples(format!(
                "grid has {} points but {} values were given",
                grid.len(),
                values.len()
            )));
        }
        if grid[0] != 0.0 {
            return Err(Error::InvalidSamples(format!("grid must start at 0, starts at {}", grid[0])));
        }
        if let Some(w) = grid.windows(2).find(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidSamples(format!(
                "grid must be strictly increasing ({} then {})",
                w[0], w[1]
            )));
        }
        Ok(Self { grid, values })
    }

    /// Sample `f` on a uniform grid of `n + 1` points covering `[0, t_end]`.
    pub fn uniform(t_end: f64, n: usize, f: impl Fn(f64) -> T) -> Result<Self> {
        let grid: Vec<f64> = (0..=n).map(|i| t_end * i as f64 / n as f64).collect();
        let values = grid.iter().map(|&t| f(t)).collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }
}

/// Riemann-Liouville integral `J^alpha f` on the grid of `f`.
pub fn rl_integral<T>(alpha: FractionalOrder, f: &SampledFunction<T>) -> SampledFunction<T>
where
    T: Copy + Default + Add<Output = T> + Mul<f64, Output = T>,
{
    let a = alpha.value();
    let scale = 1.0 / gamma(a);
    let t = &f.grid;
    let v = &f.values;
    let mut out = Vec::with_capacity(t.len());
    out.push(T::default());
    for n in 1..t.len() {
        let mut acc = T::default();
        for j in 0..n {
            // exact integral of (t_n - s)^{a-1} against the linear interpolant on [t_j, t_{j+1}]
            let h = t[j + 1] - t[j];
            let far = t[n] - t[j];
            let near = t[n] - t[j + 1];
            let pa = (far.powf(a) - near.powf(a)) / a;
            let pa1 = (far.powf(a + 1.0) - near.powf(a + 1.0)) / (a + 1.0);
            let w_right = (far * pa - pa1) / h;
            let w_left = (pa1 - near * pa) / h;
            acc = acc + v[j] * w_left + v[j + 1] * w_right;
        }
        out.push(acc * scale);
    }
    SampledFunction {
        grid: f.grid.clone(),
        values: out,
    }
}

/// Caputo derivative by the L1 scheme.
pub fn caputo_derivative<T>(alpha: FractionalOrder, f: &SampledFunction<T>) -> SampledFunction<T>
where
    T: Copy + Default + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T>,
{
    let a = alpha.value();
    let scale = 1.0 / gamma(2.0 - a);
    let t = &f.grid;
    let v = &f.values;
    let mut out = Vec::with_capacity(t.len());
    out.push(T::default());
    for n in 1..t.len() {
        let mut acc = T::default();
        for j in 0..n {
            let h = t[j + 1] - t[j];
            let w = ((t[n] - t[j]).powf(1.0 - a) - (t[n] - t[j + 1]).powf(1.0 - a)) / h;
            acc = acc + (v[j + 1] - v[j]) * w;
        }
        out.push(acc * scale);
    }
    SampledFunction {
        grid: f.grid.clone(),
        values: out,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn order(a: f64) -> FractionalOrder {
        FractionalOrder::new(a).unwrap()
    }

    #[test]
    fn order_rejects_outside_open_interval() {
        for a in [0.0, 1.0, 1.5, -0.2, f64::NAN] {
            assert!(FractionalOrder::new(a).is_err(), "alpha = {a}");
        }
        assert!(FractionalOrder::classical().is_classical());
        assert!(!order(0.4).is_classical());
    }

    #[test]
    fn sampled_function_invariants() {
        assert!(SampledFunction::new(vec![0.0], vec![1.0]).is_err());
        assert!(SampledFunction::new(vec![0.0, 1.0], vec![1.0]).is_err());
        assert!(SampledFunction::new(vec![0.0, 1.0, 1.0], vec![1.0; 3]).is_err());
        assert!(SampledFunction::new(vec![0.1, 1.0], vec![1.0; 2]).is_err());
        assert!(SampledFunction::new(vec![0.0, 0.5, 1.0], vec![1.0; 3]).is_ok());
    }

    #[test]
    fn integral_of_constant_and_linear() {
        // J^a 1 = t^a / Gamma(a + 1); J^a t = t^{a+1} / Gamma(a + 2); both exact for
        // piecewise-linear data
        let a = order(0.5);
        let one = SampledFunction::uniform(1.0, 10, |_| 1.0).unwrap();
        let got = rl_integral(a, &one);
        assert!((got.values()[10] - 1.1283791671).abs() < 1e-9);
        let lin = SampledFunction::uniform(1.0, 7, |t| t).unwrap();
        let got = rl_integral(a, &lin);
        assert!((got.values()[7] - 0.7522527781).abs() < 1e-9);
        let zero = SampledFunction::uniform(1.0, 5, |_| 0.0).unwrap();
        assert!(rl_integral(a, &zero).values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn caputo_of_constant_and_linear() {
        let a = order(0.5);
        let c = SampledFunction::uniform(1.0, 9, |_| 3.0).unwrap();
        assert!(caputo_derivative(a, &c).values().iter().all(|&v| v == 0.0));
        // D^a t = t^{1-a} / Gamma(2 - a)
        let lin = SampledFunction::uniform(1.0, 9, |t| t).unwrap();
        assert!((caputo_derivative(a, &lin).values()[9] - 1.1283791671).abs() < 1e-9);
    }

    #[test]
    fn works_on_nonuniform_grids() {
        let a = order(0.3);
        let grid: Vec<f64> = (0..=40).map(|i| (i as f64 / 40.0).powi(2)).collect();
        let f = SampledFunction::new(grid.clone(), grid.clone()).unwrap();
        let j = rl_integral(a, &f);
        for (t, v) in grid.iter().zip(j.values()) {
            let exact = t.powf(1.3) / gamma(2.3);
            assert!((v - exact).abs() < 1e-12, "t = {t}");
        }
    }

    #[test]
    fn complex_samples() {
        let a = order(0.5);
        let f = SampledFunction::uniform(1.0, 4, |t| Complex64::new(t, -2.0 * t)).unwrap();
        let d = caputo_derivative(a, &f);
        let last = d.values()[4];
        assert!((last.re - 1.1283791671).abs() < 1e-9);
        assert!((last.im + 2.0 * 1.1283791671).abs() < 1e-9);
    }

    fn error_at_one(n: usize, a: FractionalOrder, caputo: bool) -> f64 {
        let f = SampledFunction::uniform(1.0, n, |t| t * t).unwrap();
        let av = a.value();
        if caputo {
            // D^a t^2 = 2 t^{2-a} / Gamma(3 - a)
            (caputo_derivative(a, &f).values()[n] - 2.0 / gamma(3.0 - av)).abs()
        } else {
            // J^a t^2 = 2 t^{2+a} / Gamma(3 + a)
            (rl_integral(a, &f).values()[n] - 2.0 / gamma(3.0 + av)).abs()
        }
    }

    #[test]
    fn l1_scheme_converges_at_order_two_minus_alpha() {
        for &av in &[0.3, 0.5, 0.7] {
            let a = order(av);
            let e1 = error_at_one(128, a, true);
            let e2 = error_at_one(256, a, true);
            let observed = (e1 / e2).log2();
            let expected = 2.0 - av;
            assert!(
                (observed - expected).abs() <= 0.25 * expected,
                "alpha {av}: observed order {observed}"
            );
        }
    }

    #[test]
    fn product_trapezoid_converges_at_least_two_minus_alpha() {
        for &av in &[0.3, 0.5, 0.7] {
            let a = order(av);
            let observed = (error_at_one(64, a, false) / error_at_one(128, a, false)).log2();
            assert!(observed >= 0.75 * (2.0 - av), "alpha {av}: observed order {observed}");
        }
    }

    #[test]
    fn integral_undoes_caputo_derivative() {
        // J^a (D^a f) = f - f(0) for smooth f, checked on a fine grid
        let a = order(0.6);
        let f = SampledFunction::uniform(2.0, 2000, |t| (1.3 * t).sin() + 0.5).unwrap();
        let back = rl_integral(a, &caputo_derivative(a, &f));
        for (k, (&got, &orig)) in back.values().iter().zip(f.values()).enumerate().step_by(100) {
            assert!((got - (orig - 0.5)).abs() < 2e-4, "index {k}: {got} vs {}", orig - 0.5);
        }
    }

    proptest! {
        #[test]
        fn operators_are_linear(
            ca in -3.0f64..3.0,
            cb in -3.0f64..3.0,
            av in 0.05f64..0.95,
            fs in proptest::collection::vec(-5.0f64..5.0, 12),
            gs in proptest::collection::vec(-5.0f64..5.0, 12),
        ) {
            let a = order(av);
            let grid: Vec<f64> = (0..12).map(|i| (i as f64 * 0.37).powf(1.2)).collect();
            let f = SampledFunction::new(grid.clone(), fs.clone()).unwrap();
            let g = SampledFunction::new(grid.clone(), gs.clone()).unwrap();
            let comb: Vec<f64> = fs.iter().zip(&gs).map(|(x, y)| ca * x + cb * y).collect();
            let h = SampledFunction::new(grid, comb).unwrap();
            for op in [rl_integral::<f64>, caputo_derivative::<f64>] {
                let lhs = op(a, &h);
                let (of, og) = (op(a, &f), op(a, &g));
                for k in 0..12 {
                    let rhs = ca * of.values()[k] + cb * og.values()[k];
                    let scale = 1.0 + ca.abs() * of.values()[k].abs() + cb.abs() * og.values()[k].abs();
                    prop_assert!((lhs.values()[k] - rhs).abs() <= 1e-12 * scale);
                }
            }
        }
    }
}
