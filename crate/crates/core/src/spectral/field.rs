use num_complex::Complex64;

use super::grid::SpectralGrid;
use crate::error::{Error, Result};

/// Relative tolerance for the Hermitian-symmetry and divergence invariants.
pub const INVARIANT_TOL: f64 = 1e-10;

/// Layout of a coefficient vector: a Fourier grid with `dim` components per
/// wavevector, or a bare list of decoupled modes for synthetic operators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FieldShape {
    Grid(SpectralGrid),
    Diagonal(usize),
}

impl FieldShape {
    pub fn n_coeffs(&self) -> usize {
        match self {
            FieldShape::Grid(g) => g.n_coeffs(),
            FieldShape::Diagonal(n) => *n,
        }
    }

    pub fn grid(&self) -> Option<&SpectralGrid> {
        match self {
            FieldShape::Grid(g) => Some(g),
            FieldShape::Diagonal(_) => None,
        }
    }
}

/// Divergence-free, real-valued, mean-free velocity field stored as Fourier
/// coefficients `coeffs[mode * dim + component]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    shape: FieldShape,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(shape: FieldShape) -> Self {
        Self {
            shape,
            coeffs: vec![Complex64::default(); shape.n_coeffs()],
        }
    }

    /// Builds a field, checking every invariant (length, mean, symmetry, divergence).
    pub fn new(shape: FieldShape, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != shape.n_coeffs() {
            return Err(Error::GridMismatch(format!(
                "expected {} coefficients, got {}",
                shape.n_coeffs(),
                coeffs.len()
            )));
        }
        let field = Self { shape, coeffs };
        if let FieldShape::Grid(g) = shape {
            let scale = field.norm().max(f64::MIN_POSITIVE);
            let defect = field.hermitian_defect();
            if defect > INVARIANT_TOL * scale {
                return Err(Error::SymmetryViolation { defect });
            }
            let div = field.divergence_defect();
            if div > INVARIANT_TOL * scale {
                return Err(Error::Domain(format!("field is not divergence-free (defect {div:e})")));
            }
            if field.coeffs[..g.dim()].iter().any(|c| c.norm() > INVARIANT_TOL * scale) {
                return Err(Error::Domain("mean mode must vanish".into()));
            }
        }
        Ok(field)
    }

    /// Skips invariant checks; callers guarantee them (diagonal maps, projections).
    pub(crate) fn from_parts(shape: FieldShape, coeffs: Vec<Complex64>) -> Self {
        debug_assert_eq!(coeffs.len(), shape.n_coeffs());
        Self { shape, coeffs }
    }

    /// Decoupled real modes for synthetic operators.
    pub fn diagonal(values: &[f64]) -> Self {
        Self {
            shape: FieldShape::Diagonal(values.len()),
            coeffs: values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        }
    }

    pub fn shape(&self) -> FieldShape {
        self.shape
    }

    pub fn grid(&self) -> Option<&SpectralGrid> {
        self.shape.grid()
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Coefficient 2-norm (the `L^2_sigma` norm of the surrogate).
    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Real inner product `Re sum conj(u_k) . v_k`.
    pub fn dot(&self, other: &Self) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a.conj() * b).re)
            .sum()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self::from_parts(self.shape, self.coeffs.iter().map(|c| c * s).collect())
    }

    /// `self += a * other`.
    pub fn add_scaled(&mut self, a: f64, other: &Self) -> Result<()> {
        self.check_shape(other)?;
        for (x, y) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *x += y * a;
        }
        Ok(())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        out.add_scaled(-1.0, other)?;
        Ok(out)
    }

    /// Convex combination `(1 - w) self + w other`, used for history interpolation.
    pub fn lerp(&self, other: &Self, w: f64) -> Result<Self> {
        self.check_shape(other)?;
        Ok(Self::from_parts(
            self.shape,
            self.coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a * (1.0 - w) + b * w)
                .collect(),
        ))
    }

    pub fn check_shape(&self, other: &Self) -> Result<()> {
        if self.shape != other.shape {
            return Err(Error::GridMismatch(format!(
                "{:?} vs {:?}",
                self.shape, other.shape
            )));
        }
        Ok(())
    }

    /// `max |u(-k) - conj(u(k))|` over all coefficients; zero for real fields.
    pub fn hermitian_defect(&self) -> f64 {
        hermitian_defect(&self.shape, &self.coeffs)
    }

    /// `max_k |k . u(k)|`.
    pub fn divergence_defect(&self) -> f64 {
        let Some(g) = self.grid() else { return 0.0 };
        let dim = g.dim();
        (0..g.len())
            .map(|idx| {
                let k = g.wavevector(idx);
                (0..dim)
                    .map(|c| self.coeffs[idx * dim + c] * k[c] as f64)
                    .sum::<Complex64>()
                    .norm()
            })
            .fold(0.0, f64::max)
    }
}

pub(crate) fn hermitian_defect(shape: &FieldShape, coeffs: &[Complex64]) -> f64 {
    let Some(g) = shape.grid() else { return 0.0 };
    let dim = g.dim();
    let mut defect: f64 = 0.0;
    for idx in 0..g.len() {
        let neg = g.neg_index(idx);
        for c in 0..dim {
            defect = defect.max((coeffs[neg * dim + c] - coeffs[idx * dim + c].conj()).norm());
        }
    }
    defect
}

/// Applies `I - k k^T / |k|^2` to every wavevector and clears the mean mode.
///
/// `raw` uses the [`SpectralField`] layout and must describe a real field.
pub fn leray_project(grid: &SpectralGrid, raw: &[Complex64]) -> Result<SpectralField> {
    let shape = FieldShape::Grid(*grid);
    if raw.len() != grid.n_coeffs() {
        return Err(Error::GridMismatch(format!(
            "expected {} coefficients, got {}",
            grid.n_coeffs(),
            raw.len()
        )));
    }
    let scale = raw.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let defect = hermitian_defect(&shape, raw);
    if defect > INVARIANT_TOL * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::SymmetryViolation { defect });
    }
    Ok(SpectralField::from_parts(shape, project_coeffs(grid, raw)))
}

pub(crate) fn project_coeffs(grid: &SpectralGrid, raw: &[Complex64]) -> Vec<Complex64> {
    let dim = grid.dim();
    let mut out = raw.to_vec();
    for c in 0..dim {
        out[c] = Complex64::default();
    }
    for idx in 1..grid.len() {
        let k = grid.wavevector(idx);
        let k2 = grid.k_squared(idx);
        let v = &mut out[idx * dim..(idx + 1) * dim];
        let kdotv: Complex64 = (0..dim).map(|c| v[c] * k[c] as f64).sum();
        for c in 0..dim {
            v[c] -= kdotv * (k[c] as f64 / k2);
        }
    }
    out
}
