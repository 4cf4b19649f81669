//! Field dumps and spectra.
//!
//! Binary layout (little endian): `u32 dim`, `u32 n_modes`, `f64 nu`, then for every
//! wavevector in lexicographic order (each axis `-n/2+1 ..= n/2`, first axis slowest)
//! the `dim` components as interleaved `(re, im)` pairs of `f64`.

use std::io::{Read, Write};

use num_complex::Complex64;

use super::field::{FieldShape, SpectralField};
use super::grid::SpectralGrid;
use crate::error::{Error, Result};

pub fn write_field<W: Write>(u: &SpectralField, mut w: W) -> Result<()> {
    let g = u
        .grid()
        .ok_or_else(|| Error::GridMismatch("only grid fields can be dumped".into()))?;
    let dim = g.dim();
    let mut buf = Vec::with_capacity(16 + 16 * g.n_coeffs());
    buf.extend_from_slice(&(dim as u32).to_le_bytes());
    buf.extend_from_slice(&(g.n_modes() as u32).to_le_bytes());
    buf.extend_from_slice(&g.nu().to_le_bytes());
    for idx in g.lexicographic() {
        for c in &u.coeffs()[idx * dim..(idx + 1) * dim] {
            buf.extend_from_slice(&c.re.to_le_bytes());
            buf.extend_from_slice(&c.im.to_le_bytes());
        }
    }
    w.write_all(&buf)?;
    Ok(())
}

/// Reads a dump written by [`write_field`], re-checking the field invariants.
pub fn read_field<R: Read>(mut r: R) -> Result<SpectralField> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    if bytes.len() < 16 {
        return Err(Error::Io("field dump shorter than its header".into()));
    }
    let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
    let f64_at = |o: usize| f64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());
    let grid = SpectralGrid::new(u32_at(0) as usize, u32_at(4) as usize, f64_at(8))?;
    let dim = grid.dim();
    let expect = 16 + 16 * grid.n_coeffs();
    if bytes.len() != expect {
        return Err(Error::Io(format!(
            "field dump has {} bytes, header implies {expect}",
            bytes.len()
        )));
    }
    let mut coeffs = vec![Complex64::default(); grid.n_coeffs()];
    let mut off = 16;
    for idx in grid.lexicographic() {
        for c in 0..dim {
            coeffs[idx * dim + c] = Complex64::new(f64_at(off), f64_at(off + 8));
            off += 16;
        }
    }
    SpectralField::new(FieldShape::Grid(grid), coeffs)
}

/// CSV of `|u(k)|` (Euclidean norm over components) for every nonzero mode.
pub fn write_spectrum_csv<W: Write>(u: &SpectralField, mut w: W) -> Result<()> {
    let g = u
        .grid()
        .ok_or_else(|| Error::GridMismatch("spectra need a Fourier grid".into()))?;
    let dim = g.dim();
    let mut out = String::from("k1,k2,k3,k_norm,amplitude\n");
    for idx in g.lexicographic() {
        let amp = u.coeffs()[idx * dim..(idx + 1) * dim]
            .iter()
            .map(|c| c.norm_sqr())
            .sum::<f64>()
            .sqrt();
        if amp == 0.0 {
            continue;
        }
        let k = g.wavevector(idx);
        out.push_str(&format!(
            "{},{},{},{:.17e},{:.17e}\n",
            k[0],
            k[1],
            k[2],
            g.k_squared(idx).sqrt(),
            amp
        ));
    }
    w.write_all(out.as_bytes())?;
    Ok(())
}
