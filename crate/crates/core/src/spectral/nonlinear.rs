use num_complex::Complex64;

use super::field::{project_coeffs, FieldShape, SpectralField};
use super::grid::SpectralGrid;
use super::transform::Transform;
use crate::error::{Error, Result};

/// Pseudo-spectral evaluator of `F u = -P (u . grad) u` with 2/3-rule dealiasing.
///
/// Holds FFT plans and scratch buffers; build once per grid and reuse.
pub struct Advection {
    grid: SpectralGrid,
    transform: Transform,
    band: Vec<bool>,
}

impl Advection {
    pub fn new(grid: SpectralGrid) -> Self {
        Self {
            grid,
            transform: Transform::new(grid),
            band: (0..grid.len()).map(|idx| grid.in_band(idx)).collect(),
        }
    }

    pub fn grid(&self) -> &SpectralGrid {
        &self.grid
    }

    pub fn apply(&self, u: &SpectralField) -> Result<SpectralField> {
        let g = &self.grid;
        if u.grid() != Some(g) {
            return Err(Error::GridMismatch(format!(
                "advection on {:?} applied to field on {:?}",
                g,
                u.shape()
            )));
        }
        let dim = g.dim();
        let len = g.len();
        let zero = Complex64::default();
        let c = u.coeffs();

        // physical velocity components and their gradients
        let mut vel = vec![vec![zero; len]; dim];
        let mut grad = vec![vec![zero; len]; dim * dim];
        for idx in 0..len {
            if !self.band[idx] {
                continue;
            }
            let k = g.wavevector(idx);
            for comp in 0..dim {
                let v = c[idx * dim + comp];
                vel[comp][idx] = v;
                for d in 0..dim {
                    grad[comp * dim + d][idx] = v * Complex64::new(0.0, k[d] as f64);
                }
            }
        }
        for buf in vel.iter_mut().chain(grad.iter_mut()) {
            self.transform.to_physical(buf);
        }

        let mut out = vec![zero; g.n_coeffs()];
        let mut adv = vec![zero; len];
        for comp in 0..dim {
            for (x, a) in adv.iter_mut().enumerate() {
                // the product of real fields is real; drop roundoff imaginary parts
                let s: f64 = (0..dim).map(|d| vel[d][x].re * grad[comp * dim + d][x].re).sum();
                *a = Complex64::new(s, 0.0);
            }
            self.transform.to_spectral(&mut adv);
            for idx in 0..len {
                if self.band[idx] {
                    out[idx * dim + comp] = -adv[idx];
                }
            }
        }
        symmetrize(g, &mut out);
        Ok(SpectralField::from_parts(FieldShape::Grid(*g), project_coeffs(g, &out)))
    }
}

/// Enforces `c(-k) = conj(c(k))` exactly, removing FFT roundoff asymmetry.
fn symmetrize(g: &SpectralGrid, coeffs: &mut [Complex64]) {
    let dim = g.dim();
    for idx in 0..g.len() {
        let neg = g.neg_index(idx);
        if neg < idx {
            continue;
        }
        for c in 0..dim {
            let a = coeffs[idx * dim + c];
            let b = coeffs[neg * dim + c];
            let avg = (a + b.conj()) * 0.5;
            coeffs[idx * dim + c] = avg;
            coeffs[neg * dim + c] = avg.conj();
        }
    }
}

/// `F u = -P (u . grad) u`, computed pseudo-spectrally; see [`Advection`].
pub fn nonlinear_term(u: &SpectralField) -> Result<SpectralField> {
    let g = u
        .grid()
        .ok_or_else(|| Error::GridMismatch("the nonlinearity needs a Fourier grid".into()))?;
    Advection::new(*g).apply(u)
}

/// Reference evaluation of `F u` by direct convolution over the dealiased band:
/// `((u . grad) u)(k) = sum_{p + q = k} (u(p) . i q) u(q)`.
///
/// Quadratic in the number of modes; intended for validation only.
pub fn dense_nonlinear_term(u: &SpectralField) -> Result<SpectralField> {
    let g = *u
        .grid()
        .ok_or_else(|| Error::GridMismatch("the nonlinearity needs a Fourier grid".into()))?;
    let dim = g.dim();
    let cut = g.dealias_cutoff();
    let c = u.coeffs();
    let band: Vec<usize> = (0..g.len()).filter(|&i| g.in_band(i)).collect();
    let mut out = vec![Complex64::default(); g.n_coeffs()];
    for &p in &band {
        let kp = g.wavevector(p);
        for &q in &band {
            let kq = g.wavevector(q);
            let k = [kp[0] + kq[0], kp[1] + kq[1], kp[2] + kq[2]];
            if k.iter().any(|v| v.abs() > cut) {
                continue;
            }
            let up_dot_iq: Complex64 = (0..dim)
                .map(|d| c[p * dim + d] * Complex64::new(0.0, kq[d] as f64))
                .sum();
            let idx = g.index_of(k);
            for comp in 0..dim {
                out[idx * dim + comp] -= up_dot_iq * c[q * dim + comp];
            }
        }
    }
    Ok(SpectralField::from_parts(FieldShape::Grid(g), project_coeffs(&g, &out)))
}
