use num_complex::Complex64;

use super::field::{FieldShape, SpectralField};
use super::grid::SpectralGrid;
use crate::error::{Error, Result};

/// Diagonal positive operator: the Stokes operator `nu |k|^2` on a grid, or a
/// user-supplied eigenvalue list acting on decoupled modes.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralOperator {
    shape: FieldShape,
    /// one eigenvalue per coefficient; the grid's mean mode carries 0 and is never excited
    eigenvalues: Vec<f64>,
}

impl SpectralOperator {
    pub fn stokes(grid: SpectralGrid) -> Self {
        let dim = grid.dim();
        let eigenvalues = (0..grid.len())
            .flat_map(|idx| std::iter::repeat(grid.eigenvalue(idx)).take(dim))
            .collect();
        Self {
            shape: FieldShape::Grid(grid),
            eigenvalues,
        }
    }

    pub fn synthetic(eigenvalues: Vec<f64>) -> Result<Self> {
        if eigenvalues.is_empty() {
            return Err(Error::Domain("synthetic operator needs at least one eigenvalue".into()));
        }
        if let Some(bad) = eigenvalues.iter().find(|&&l| !(l > 0.0) || !l.is_finite()) {
            return Err(Error::Domain(format!("eigenvalues must be positive, got {bad}")));
        }
        Ok(Self {
            shape: FieldShape::Diagonal(eigenvalues.len()),
            eigenvalues,
        })
    }

    pub fn shape(&self) -> FieldShape {
        self.shape
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Smallest eigenvalue on active coefficients.
    pub fn lambda_min(&self) -> f64 {
        self.eigenvalues.iter().copied().filter(|&l| l > 0.0).fold(f64::INFINITY, f64::min)
    }

    pub fn lambda_max(&self) -> f64 {
        self.eigenvalues.iter().copied().fold(0.0, f64::max)
    }

    /// Coefficient-wise multiplication by `symbol(lambda)`; zero-eigenvalue slots are
    /// left at zero.
    pub fn apply_symbol(&self, u: &SpectralField, symbol: impl Fn(f64) -> f64) -> Result<SpectralField> {
        self.check(u)?;
        let coeffs = u
            .coeffs()
            .iter()
            .zip(&self.eigenvalues)
            .map(|(c, &l)| if l > 0.0 { c * symbol(l) } else { Complex64::default() })
            .collect();
        Ok(SpectralField::from_parts(self.shape, coeffs))
    }

    pub fn check(&self, u: &SpectralField) -> Result<()> {
        if u.shape() != self.shape {
            return Err(Error::GridMismatch(format!(
                "operator on {:?} applied to field on {:?}",
                self.shape,
                u.shape()
            )));
        }
        Ok(())
    }
}

/// `A^beta u`, coefficient-wise `lambda^beta`.
pub fn apply_fractional_power(op: &SpectralOperator, beta: f64, u: &SpectralField) -> Result<SpectralField> {
    if beta == 0.0 {
        op.check(u)?;
        return Ok(u.clone());
    }
    op.apply_symbol(u, |l| l.powf(beta))
}

/// `||A^beta u|| = (sum lambda^{2 beta} |u_k|^2)^{1/2}`.
pub fn sobolev_norm(op: &SpectralOperator, beta: f64, u: &SpectralField) -> Result<f64> {
    op.check(u)?;
    Ok(u.coeffs()
        .iter()
        .zip(op.eigenvalues())
        .filter(|(_, &l)| l > 0.0)
        .map(|(c, &l)| c.norm_sqr() * l.powf(2.0 * beta))
        .sum::<f64>()
        .sqrt())
}
