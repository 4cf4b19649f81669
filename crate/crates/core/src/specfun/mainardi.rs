//! Mainardi (M-Wright) function and the integrals that tie it to the solution
//! operators.
//!
//! Small arguments use the defining power series
//! `M_a(t) = (1/pi) sum_{n>=1} (-t)^{n-1}/(n-1)! Gamma(a n) sin(pi a n)`.
//! The series cancels catastrophically for large `t`, so beyond `t = 1` we use the
//! non-oscillatory representation obtained from Kanter's formula for the one-sided
//! stable density (`M_a(t) = t^{-1-1/a} L_a(t^{-1/a}) / a`):
//!
//! `M_a(t) = t^{a/(1-a)} / (pi (1-a)) int_0^pi K(phi) exp(-t^{1/(1-a)} K(phi)) dphi`,
//! `K(phi) = sin(a phi)^{a/(1-a)} sin((1-a) phi) / sin(phi)^{1/(1-a)}`.

use std::f64::consts::PI;

use quadrature::double_exponential;

use super::fractional::FractionalOrder;
use super::gamma::gamma;
use crate::error::{Error, Result};

const SERIES_CUTOFF: f64 = 1.0;

/// `M_alpha(t)` for `t >= 0`.
pub fn mainardi(alpha: FractionalOrder, t: f64) -> Result<f64> {
    if alpha.is_classical() {
        return Err(Error::Domain(
            "the Mainardi function degenerates to a point mass at alpha = 1".into(),
        ));
    }
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("Mainardi argument must be >= 0, got {t}")));
    }
    let a = alpha.value();
    if a == 0.5 {
        return Ok((-t * t / 4.0).exp() / PI.sqrt());
    }
    if t <= SERIES_CUTOFF {
        Ok(series(a, t))
    } else {
        Ok(kanter(a, t))
    }
}

fn series(a: f64, t: f64) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    // (-t)^{n-1} / (n-1)!
    let mut coeff: f64 = 1.0;
    for n in 1..200 {
        let nf = n as f64;
        let magnitude = coeff.abs() * gamma(a * nf);
        let term = coeff * gamma(a * nf) * (PI * a * nf).sin();
        let y = term - comp;
        let s = sum + y;
        comp = (s - sum) - y;
        sum = s;
        if n > 3 && magnitude < 1e-18 * sum.abs() {
            break;
        }
        coeff *= -t / nf;
    }
    sum / PI
}

fn kanter_log_k(a: f64, phi: f64) -> f64 {
    let e = 1.0 / (1.0 - a);
    a * e * (a * phi).sin().ln() + ((1.0 - a) * phi).sin().ln() - e * phi.sin().ln()
}

fn kanter(a: f64, t: f64) -> f64 {
    let e = 1.0 / (1.0 - a);
    let c = t.powf(e);
    // K is increasing on (0, pi) with K(0+) = a^{a/(1-a)} (1 - a)
    let k0 = a.powf(a * e) * (1.0 - a);
    let integrand = |phi: f64| {
        if phi <= 0.0 {
            return k0;
        }
        if phi >= PI {
            return 0.0;
        }
        let lk = kanter_log_k(a, phi);
        let k = lk.exp();
        let v = (lk - c * (k - k0)).exp();
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    // the mass concentrates at phi = 0 as c grows; geometric panels resolve it
    let mut total = 0.0;
    let mut hi = PI;
    let mut panels = Vec::new();
    while hi > 1e-9 {
        let lo = hi / 4.0;
        panels.push((lo, hi));
        hi = lo;
    }
    panels.push((0.0, hi));
    let rough: f64 = panels
        .iter()
        .map(|&(lo, hi)| double_exponential::integrate(integrand, lo, hi, 1e-6).integral)
        .sum();
    let target = (1e-15 * rough.abs()).max(1e-300);
    for &(lo, hi) in &panels {
        total += double_exponential::integrate(integrand, lo, hi, target).integral;
    }
    let log_prefactor = a * e * t.ln() - (PI * (1.0 - a)).ln() - c * k0;
    total * log_prefactor.exp()
}

/// `int_0^inf s^q M_alpha(s) ds` by quadrature with an explicit tail bound.
///
/// Fails with [`Error::Quadrature`] when the neglected tail beyond the last panel
/// exceeds `1e-10`.
pub fn mainardi_moment(alpha: FractionalOrder, q: f64) -> Result<f64> {
    if !(q > -1.0) {
        return Err(Error::Domain(format!("moment order must satisfy q > -1, got {q}")));
    }
    // s = u^{1/(q+1)} removes the endpoint singularity of s^q on [0, 1]
    let head = double_exponential::integrate(
        |u| mainardi(alpha, u.powf(1.0 / (q + 1.0))).unwrap_or(0.0),
        0.0,
        1.0,
        1e-14,
    )
    .integral
        / (q + 1.0);
    integrate_against(alpha, |s| s.powf(q), head, 1e-10)
}

/// `int_0^inf M_alpha(s) exp(-p s) ds`, which equals `E_alpha(-p)`.
pub fn mainardi_laplace(alpha: FractionalOrder, p: f64) -> Result<f64> {
    if !(p >= 0.0) {
        return Err(Error::Domain(format!("Laplace variable must be >= 0, got {p}")));
    }
    let weight = |s: f64| (-p * s).exp();
    let head = double_exponential::integrate(
        |s| weight(s) * mainardi(alpha, s).unwrap_or(0.0),
        0.0,
        1.0,
        1e-14,
    )
    .integral;
    integrate_against(alpha, weight, head, 1e-10)
}

/// Adds the contribution of `[1, inf)` to `head`, the integral over `[0, 1]`.
fn integrate_against(
    alpha: FractionalOrder,
    weight: impl Fn(f64) -> f64,
    head: f64,
    tol: f64,
) -> Result<f64> {
    let a = alpha.value();
    if alpha.is_classical() {
        return Err(Error::Domain("Mainardi integrals need 0 < alpha < 1".into()));
    }
    let f = |s: f64| weight(s) * mainardi(alpha, s).unwrap_or(0.0);
    // panels [1,2], [2,4], ...; stop once the integrand is negligible
    let mut total = head;
    let mut lo = 1.0;
    let s_max = 2048.0;
    loop {
        let hi = 2.0 * lo;
        total += double_exponential::integrate(f, lo, hi, 1e-14).integral;
        lo = hi;
        let edge = f(lo).abs();
        // log-derivative of the integrand at the edge sets the tail's decay length
        let slope = (f(lo * 1.01).abs().ln() - edge.ln()) / (0.01 * lo);
        let tail = if edge == 0.0 {
            0.0
        } else if slope < 0.0 {
            edge / -slope
        } else {
            f64::INFINITY
        };
        if tail <= 1e-3 * tol {
            return Ok(total);
        }
        if lo >= s_max {
            if tail <= tol {
                return Ok(total);
            }
            return Err(Error::Quadrature(format!(
                "tail estimate {tail:e} beyond s = {lo} exceeds tolerance {tol:e} (alpha = {a})"
            )));
        }
    }
}
