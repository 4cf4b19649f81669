use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Periodic box `[0, 2pi)^dim` resolved by `n_modes` Fourier modes per axis.
///
/// Modes are stored in FFT order: index `i` along an axis carries wavenumber `i`
/// for `i <= n/2` and `i - n` otherwise, so the per-axis set is `{-n/2+1, ..., n/2}`.
/// Multi-indices are row-major (last axis fastest).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralGrid {
    dim: usize,
    n_modes: usize,
    nu: f64,
}

impl SpectralGrid {
    pub fn new(dim: usize, n_modes: usize, nu: f64) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(Error::Domain(format!("dim must be 2 or 3, got {dim}")));
        }
        if n_modes < 4 || n_modes % 2 != 0 {
            return Err(Error::Domain(format!("n_modes must be even and >= 4, got {n_modes}")));
        }
        if !(nu > 0.0) || !nu.is_finite() {
            return Err(Error::Domain(format!("viscosity must be positive, got {nu}")));
        }
        Ok(Self { dim, n_modes, nu })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    /// Number of wavevectors, `n^dim`.
    pub fn len(&self) -> usize {
        self.n_modes.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Number of complex coefficients in a vector field (`dim` per wavevector).
    pub fn n_coeffs(&self) -> usize {
        self.len() * self.dim
    }

    fn wrap(&self, i: usize) -> i64 {
        let n = self.n_modes;
        if i <= n / 2 {
            i as i64
        } else {
            i as i64 - n as i64
        }
    }

    fn unwrap_k(&self, k: i64) -> usize {
        k.rem_euclid(self.n_modes as i64) as usize
    }

    /// Wavevector of mode `idx`; unused trailing components are zero in 2D.
    pub fn wavevector(&self, idx: usize) -> [i64; 3] {
        let n = self.n_modes;
        let mut k = [0i64; 3];
        let mut rem = idx;
        for axis in (0..self.dim).rev() {
            k[axis] = self.wrap(rem % n);
            rem /= n;
        }
        k
    }

    /// Storage index of wavevector `k` (components taken modulo `n`).
    pub fn index_of(&self, k: [i64; 3]) -> usize {
        (0..self.dim).fold(0, |acc, axis| acc * self.n_modes + self.unwrap_k(k[axis]))
    }

    /// Index of `-k`, wrapping the Nyquist row onto itself.
    pub fn neg_index(&self, idx: usize) -> usize {
        let k = self.wavevector(idx);
        self.index_of([-k[0], -k[1], -k[2]])
    }

    pub fn k_squared(&self, idx: usize) -> f64 {
        let k = self.wavevector(idx);
        k.iter().map(|&c| (c * c) as f64).sum()
    }

    /// Largest per-axis wavenumber retained by the 2/3 rule: products of two retained
    /// modes never alias back into the retained band.
    pub fn dealias_cutoff(&self) -> i64 {
        ((self.n_modes - 1) / 3) as i64
    }

    pub fn in_band(&self, idx: usize) -> bool {
        let cut = self.dealias_cutoff();
        self.wavevector(idx).iter().all(|c| c.abs() <= cut)
    }

    /// Stokes eigenvalue `nu |k|^2` of mode `idx` (zero for the mean mode).
    pub fn eigenvalue(&self, idx: usize) -> f64 {
        self.nu * self.k_squared(idx)
    }

    /// Wavevectors in lexicographic order, each axis running `-n/2+1 ..= n/2`,
    /// first axis slowest; yields storage indices.
    pub fn lexicographic(&self) -> impl Iterator<Item = usize> + '_ {
        let n = self.n_modes as i64;
        let lo = -n / 2 + 1;
        let dim = self.dim;
        (0..self.len()).map(move |pos| {
            let mut k = [0i64; 3];
            let mut rem = pos as i64;
            for axis in (0..dim).rev() {
                k[axis] = lo + rem % n;
                rem /= n;
            }
            self.index_of(k)
        })
    }
}
