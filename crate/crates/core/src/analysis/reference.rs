//! Independent reference integrators for the classical (`alpha = 1`) limit.

use crate::error::{Error, Result};
use crate::spectral::{Advection, SpectralField, SpectralOperator};

/// `phi_1(z) = (e^z - 1) / z` and `phi_2(z) = (e^z - 1 - z) / z^2`, series near 0.
fn phi12(z: f64) -> (f64, f64) {
    if z.abs() < 1e-3 {
        (1.0 + z / 2.0 + z * z / 6.0 + z * z * z / 24.0, 0.5 + z / 6.0 + z * z / 24.0 + z * z * z / 120.0)
    } else {
        let e = z.exp_m1();
        (e / z, (e - z) / (z * z))
    }
}

/// Cox-Matthews ETD2RK for `u' = -A u + F u`: second order, exact on the linear part.
pub fn etd2rk(op: &SpectralOperator, u0: &SpectralField, t_end: f64, n_steps: usize) -> Result<SpectralField> {
    let grid = op
        .shape()
        .grid()
        .copied()
        .ok_or_else(|| Error::Config("the reference integrator needs a Fourier grid".into()))?;
    if n_steps == 0 || !(t_end > 0.0) {
        return Err(Error::Domain("need t_end > 0 and at least one step".into()));
    }
    let adv = Advection::new(grid);
    let h = t_end / n_steps as f64;
    let e = |l: f64| (-l * h).exp();
    let p1 = |l: f64| h * phi12(-l * h).0;
    let p2 = |l: f64| h * phi12(-l * h).1;
    let mut u = u0.clone();
    for _ in 0..n_steps {
        let fu = adv.apply(&u)?;
        let mut a = op.apply_symbol(&u, e)?;
        a.add_scaled(1.0, &op.apply_symbol(&fu, p1)?)?;
        let fa = adv.apply(&a)?;
        let mut next = a;
        next.add_scaled(1.0, &op.apply_symbol(&fa.sub(&fu)?, p2)?)?;
        u = next;
    }
    Ok(u)
}

/// Scalar delay ODE `y' = -lambda y + kappa y(t - r)` with `y = y0` on `[-r, 0]`,
/// integrated by the method of steps with classical RK4; delayed values between
/// nodes use cubic Hermite interpolation of the stored solution.
pub fn delay_ode_reference(lambda: f64, kappa: f64, r: f64, y0: f64, t_end: f64, n_steps: usize) -> Result<Vec<(f64, f64)>> {
    if !(r > 0.0) || !(t_end > 0.0) || n_steps == 0 {
        return Err(Error::Domain("need r > 0, t_end > 0 and at least one step".into()));
    }
    let h = t_end / n_steps as f64;
    let rhs = |y: f64, lag: f64| -lambda * y + kappa * lag;
    let mut ys = vec![y0];
    let mut ds = vec![rhs(y0, y0)];
    let lag = |ys: &[f64], ds: &[f64], s: f64| -> f64 {
        if s <= 0.0 {
            return y0;
        }
        let x = s / h;
        let i = (x.floor() as usize).min(ys.len() - 2);
        let w = x - i as f64;
        let (h00, h10, h01, h11) = (
            2.0 * w.powi(3) - 3.0 * w * w + 1.0,
            w.powi(3) - 2.0 * w * w + w,
            -2.0 * w.powi(3) + 3.0 * w * w,
            w.powi(3) - w * w,
        );
        h00 * ys[i] + h * h10 * ds[i] + h01 * ys[i + 1] + h * h11 * ds[i + 1]
    };
    if r < h {
        return Err(Error::Domain("the reference needs the delay to span at least one step".into()));
    }
    for j in 0..n_steps {
        let t = j as f64 * h;
        let y = ys[j];
        let k1 = rhs(y, lag(&ys, &ds, t - r));
        let mid = lag(&ys, &ds, t + 0.5 * h - r);
        let k2 = rhs(y + 0.5 * h * k1, mid);
        let k3 = rhs(y + 0.5 * h * k2, mid);
        let k4 = rhs(y + h * k3, lag(&ys, &ds, t + h - r));
        let next = y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        ys.push(next);
        ds.push(rhs(next, lag(&ys, &ds, t + h - r)));
    }
    Ok(ys.iter().enumerate().map(|(j, &y)| (j as f64 * h, y)).collect())
}
