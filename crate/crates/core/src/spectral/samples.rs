use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::field::{project_coeffs, FieldShape, SpectralField};
use super::grid::SpectralGrid;

/// Random divergence-free field inside the dealiased band.
///
/// Coefficients are i.i.d. complex Gaussians scaled by `|k|^{-decay}`, symmetrized
/// to a real field and Leray-projected. Draws happen in storage order, so a seeded
/// generator gives a reproducible field.
pub fn random_field<R: Rng + ?Sized>(grid: &SpectralGrid, decay: f64, rng: &mut R) -> SpectralField {
    let dim = grid.dim();
    let mut raw = vec![Complex64::default(); grid.n_coeffs()];
    for idx in 1..grid.len() {
        if !grid.in_band(idx) {
            continue;
        }
        let amp = grid.k_squared(idx).powf(-0.5 * decay);
        for c in 0..dim {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            raw[idx * dim + c] = Complex64::new(re, im) * amp;
        }
    }
    let mut sym = raw.clone();
    for idx in 0..grid.len() {
        let neg = grid.neg_index(idx);
        for c in 0..dim {
            sym[idx * dim + c] = (raw[idx * dim + c] + raw[neg * dim + c].conj()) * 0.5;
        }
    }
    SpectralField::from_parts(FieldShape::Grid(*grid), project_coeffs(grid, &sym))
}

/// Taylor–Green vortex `amplitude * (sin x cos y, -cos x sin y[, 0])`.
pub fn taylor_green(grid: &SpectralGrid, amplitude: f64) -> SpectralField {
    let dim = grid.dim();
    let mut coeffs = vec![Complex64::default(); grid.n_coeffs()];
    for s1 in [-1i64, 1] {
        for s2 in [-1i64, 1] {
            let idx = grid.index_of([s1, s2, 0]);
            coeffs[idx * dim] = Complex64::new(0.0, -0.25 * amplitude * s1 as f64);
            coeffs[idx * dim + 1] = Complex64::new(0.0, 0.25 * amplitude * s2 as f64);
        }
    }
    SpectralField::from_parts(FieldShape::Grid(*grid), coeffs)
}
