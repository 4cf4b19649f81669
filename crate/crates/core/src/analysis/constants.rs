use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::solops::{audit_operator_bounds, log_grid, Bound, OperatorFamily};
use crate::spectral::{random_field, sobolev_norm, Advection, SpectralField, SpectralGrid, SpectralOperator};

/// Empirical suprema of the bilinear and operator bounds, with how they were sampled.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct EstimatedConstants {
    /// `||A^{-1/4} F u|| <= c1 ||A^{1/2} u||^2`, and the matching Lipschitz form
    pub c1: f64,
    /// `||F u|| <= c2 ||A^{1/2} u|| ||A^{3/4} u||`, and the matching Lipschitz form
    pub c2: f64,
    pub b1: f64,
    pub b2: f64,
    pub b3: f64,
    pub cap_c1: f64,
    pub cap_c2: f64,
    pub cap_c3: f64,
    pub notes: Vec<String>,
}

/// Bilinear ratios of one field, or of a pair for the Lipschitz forms.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct BilinearRatios {
    pub c1: f64,
    pub c2: f64,
    pub c1_lipschitz: f64,
    pub c2_lipschitz: f64,
}

fn norms(op: &SpectralOperator, u: &SpectralField) -> Result<(f64, f64, f64)> {
    Ok((sobolev_norm(op, -0.25, u)?, sobolev_norm(op, 0.5, u)?, sobolev_norm(op, 0.75, u)?))
}

/// Ratios for `u` and the pair `(u, v)`; zero fields give zero ratios (0/0 excluded).
pub fn bilinear_ratios(adv: &Advection, op: &SpectralOperator, u: &SpectralField, v: &SpectralField) -> Result<BilinearRatios> {
    let fu = adv.apply(u)?;
    let fv = adv.apply(v)?;
    let (_, u_half, u_tq) = norms(op, u)?;
    let (_, v_half, _) = norms(op, v)?;
    let (fu_q, _, _) = norms(op, &fu)?;
    let mut out = BilinearRatios::default();
    if u_half > 0.0 {
        out.c1 = fu_q / (u_half * u_half);
        out.c2 = fu.norm() / (u_half * u_tq);
    }
    let d = u.sub(v)?;
    let df = fu.sub(&fv)?;
    let (df_q, _, _) = norms(op, &df)?;
    let (_, d_half, d_tq) = norms(op, &d)?;
    let lip1 = d_half * (u_half + v_half);
    if lip1 > 0.0 {
        out.c1_lipschitz = df_q / lip1;
    }
    let lip2 = d_half * u_tq + d_tq * v_half;
    if lip2 > 0.0 {
        out.c2_lipschitz = df.norm() / lip2;
    }
    Ok(out)
}

/// Suprema of the bilinear ratios over `n_samples` random divergence-free fields.
///
/// Sample `i` draws from its own ChaCha stream of `seed`, with spectral decay
/// `decays[i % len]`, so the result is bit-reproducible for any thread count.
pub fn estimate_bilinear_constants(
    grid: &SpectralGrid,
    n_samples: usize,
    decays: &[f64],
    seed: u64,
) -> Result<EstimatedConstants> {
    if n_samples < 100 {
        return Err(Error::InsufficientSamples(format!("need >= 100 samples, got {n_samples}")));
    }
    if decays.is_empty() {
        return Err(Error::Config("decay family is empty".into()));
    }
    let op = SpectralOperator::stokes(*grid);
    let adv = Advection::new(*grid);
    let ratios = (0..n_samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let decay = decays[i % decays.len()];
            let u = random_field(grid, decay, &mut rng);
            let v = random_field(grid, decay, &mut rng);
            bilinear_ratios(&adv, &op, &u, &v)
        })
        .collect::<Result<Vec<_>>>()?;
    let sup = |f: fn(&BilinearRatios) -> f64| ratios.iter().map(f).fold(0.0, f64::max);
    Ok(EstimatedConstants {
        c1: sup(|r| r.c1).max(sup(|r| r.c1_lipschitz)),
        c2: sup(|r| r.c2).max(sup(|r| r.c2_lipschitz)),
        notes: vec![format!(
            "bilinear: grid {}^{} nu {}, {} samples, decays {:?}, seed {}",
            grid.n_modes(),
            grid.dim(),
            grid.nu(),
            n_samples,
            decays,
            seed
        )],
        ..Default::default()
    })
}

/// Adds the solution-operator constants from an audit on `t in [t_min, t_max]`.
pub fn estimate_operator_constants(
    fam: &OperatorFamily,
    beta: f64,
    t_min: f64,
    t_max: f64,
    n_t: usize,
    into: &mut EstimatedConstants,
) -> Result<()> {
    let report = audit_operator_bounds(fam, &[beta], &log_grid(t_min, t_max, n_t))?;
    let get = |b| report.constant(b, if matches!(b, Bound::C3 | Bound::B3) { beta } else { 0.0 }).unwrap_or(0.0);
    into.cap_c1 = get(Bound::C1);
    into.cap_c2 = get(Bound::C2);
    into.cap_c3 = get(Bound::C3);
    into.b1 = get(Bound::B1);
    into.b2 = get(Bound::B2);
    into.b3 = get(Bound::B3);
    into.notes.push(format!(
        "operators: alpha {}, beta {beta}, {n_t} log-spaced t in [{t_min:e}, {t_max:e}]",
        fam.alpha().value()
    ));
    Ok(())
}
