use crate::error::{Error, Result};
use crate::specfun::{mittag_leffler, FractionalOrder};
use crate::spectral::{apply_fractional_power, SpectralField, SpectralOperator};

/// Scalar symbol of `S_alpha(t)`: `E_alpha(-lambda t^alpha)`; identity at `t = 0`.
pub fn symbol_s(alpha: FractionalOrder, lambda: f64, t: f64) -> Result<f64> {
    if t < 0.0 {
        return Err(Error::Domain(format!("S_alpha(t) needs t >= 0, got {t}")));
    }
    if t == 0.0 {
        return Ok(1.0);
    }
    let a = alpha.value();
    mittag_leffler(a, 1.0, -lambda * t.powf(a))
}

/// Scalar symbol of `T_alpha(t)`: `t^{alpha-1} E_{alpha,alpha}(-lambda t^alpha)`.
pub fn symbol_t(alpha: FractionalOrder, lambda: f64, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!(
            "T_alpha(t) is singular at t = 0 and undefined for t < 0, got {t}"
        )));
    }
    let a = alpha.value();
    Ok(t.powf(a - 1.0) * mittag_leffler(a, a, -lambda * t.powf(a))?)
}

/// `int_0^h s^{alpha-1} E_{alpha,alpha}(-lambda s^alpha) ds = h^alpha E_{alpha,alpha+1}(-lambda h^alpha)`.
pub fn kernel_mass(alpha: FractionalOrder, lambda: f64, h: f64) -> Result<f64> {
    if h < 0.0 {
        return Err(Error::Domain(format!("panel length must be >= 0, got {h}")));
    }
    if h == 0.0 {
        return Ok(0.0);
    }
    let a = alpha.value();
    let ha = h.powf(a);
    Ok(ha * mittag_leffler(a, a + 1.0, -lambda * ha)?)
}

/// `d/dt E_alpha(-lambda t^alpha) = -lambda t^{alpha-1} E_{alpha,alpha}(-lambda t^alpha)`.
pub fn symbol_s_derivative(alpha: FractionalOrder, lambda: f64, t: f64) -> Result<f64> {
    Ok(-lambda * symbol_t(alpha, lambda, t)?)
}

/// The pair `(S_alpha, T_alpha)` generated by a diagonal operator.
#[derive(Debug, Clone)]
pub struct OperatorFamily {
    alpha: FractionalOrder,
    op: SpectralOperator,
}

impl OperatorFamily {
    pub fn new(alpha: FractionalOrder, op: SpectralOperator) -> Self {
        Self { alpha, op }
    }

    pub fn alpha(&self) -> FractionalOrder {
        self.alpha
    }

    pub fn op(&self) -> &SpectralOperator {
        &self.op
    }

    /// Sorted distinct positive eigenvalues.
    pub fn distinct_eigenvalues(&self) -> Vec<f64> {
        let mut ls: Vec<f64> = self.op.eigenvalues().iter().copied().filter(|&l| l > 0.0).collect();
        ls.sort_by(f64::total_cmp);
        ls.dedup();
        ls
    }

    /// Applies `symbol(lambda)` with one evaluation per distinct eigenvalue.
    fn apply_cached(
        &self,
        u: &SpectralField,
        symbol: impl Fn(f64) -> Result<f64>,
    ) -> Result<SpectralField> {
        let ls = self.distinct_eigenvalues();
        let values = ls.iter().map(|&l| symbol(l)).collect::<Result<Vec<_>>>()?;
        self.op.apply_symbol(u, |l| {
            let i = ls.partition_point(|&x| x < l);
            values[i]
        })
    }

    pub fn apply_s(&self, t: f64, u: &SpectralField) -> Result<SpectralField> {
        if t == 0.0 {
            self.op.check(u)?;
            return Ok(u.clone());
        }
        self.apply_cached(u, |l| symbol_s(self.alpha, l, t))
    }

    pub fn apply_t(&self, t: f64, u: &SpectralField) -> Result<SpectralField> {
        self.apply_cached(u, |l| symbol_t(self.alpha, l, t))
    }
}

/// `S_alpha(t) u`.
pub fn apply_s(fam: &OperatorFamily, t: f64, u: &SpectralField) -> Result<SpectralField> {
    fam.apply_s(t, u)
}

/// `T_alpha(t) u`.
pub fn apply_t(fam: &OperatorFamily, t: f64, u: &SpectralField) -> Result<SpectralField> {
    fam.apply_t(t, u)
}

/// `||A^beta S u - S A^beta u|| / ||A^beta u||`.
pub fn check_commutation(fam: &OperatorFamily, beta: f64, u: &SpectralField, t: f64) -> Result<f64> {
    let op = fam.op();
    let a_u = apply_fractional_power(op, beta, u)?;
    let lhs = apply_fractional_power(op, beta, &fam.apply_s(t, u)?)?;
    let rhs = fam.apply_s(t, &a_u)?;
    let denom = a_u.norm();
    if denom == 0.0 {
        return Ok(0.0);
    }
    Ok(lhs.sub(&rhs)?.norm() / denom)
}

/// `sup_lambda lambda^beta |T(t) - T(t0)|` over the eigenvalue table: the
/// uniform-topology distance between `A^beta T_alpha(t)` and `A^beta T_alpha(t0)`.
pub fn continuity_modulus(fam: &OperatorFamily, beta: f64, t0: f64, t: f64) -> Result<f64> {
    let mut sup: f64 = 0.0;
    for l in fam.distinct_eigenvalues() {
        let d = symbol_t(fam.alpha, l, t)? - symbol_t(fam.alpha, l, t0)?;
        sup = sup.max(l.powf(beta) * d.abs());
    }
    Ok(sup)
}
