use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::grid::SpectralGrid;

/// Multi-dimensional complex FFT on a [`SpectralGrid`], applied axis by axis.
///
/// `to_physical` evaluates `sum_k c_k exp(i k.x)` at the collocation points;
/// `to_spectral` is its exact inverse.
pub struct Transform {
    grid: SpectralGrid,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl Transform {
    pub fn new(grid: SpectralGrid) -> Self {
        let mut planner = FftPlanner::new();
        let n = grid.n_modes();
        Self {
            grid,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    pub fn to_physical(&self, data: &mut [Complex64]) {
        self.apply(data, &self.inverse);
    }

    pub fn to_spectral(&self, data: &mut [Complex64]) {
        self.apply(data, &self.forward);
        let scale = 1.0 / self.grid.len() as f64;
        for v in data.iter_mut() {
            *v *= scale;
        }
    }

    fn apply(&self, data: &mut [Complex64], fft: &Arc<dyn Fft<f64>>) {
        let n = self.grid.n_modes();
        let dim = self.grid.dim();
        debug_assert_eq!(data.len(), self.grid.len());
        let mut line = vec![Complex64::default(); n];
        let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
        for axis in 0..dim {
            let stride = n.pow((dim - 1 - axis) as u32);
            if stride == 1 {
                for chunk in data.chunks_exact_mut(n) {
                    fft.process_with_scratch(chunk, &mut scratch);
                }
                continue;
            }
            let block = stride * n;
            for outer in (0..data.len()).step_by(block) {
                for inner in 0..stride {
                    let base = outer + inner;
                    for (j, v) in line.iter_mut().enumerate() {
                        *v = data[base + j * stride];
                    }
                    fft.process_with_scratch(&mut line, &mut scratch);
                    for (j, v) in line.iter().enumerate() {
                        data[base + j * stride] = *v;
                    }
                }
            }
        }
    }
}
