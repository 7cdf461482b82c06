//! Seeded Monte-Carlo helpers shared by the uncertainty estimators.
//!
//! Draw `i` of a run with seed `s` always uses ChaCha stream `i` of seed
//! `s`, so results do not depend on evaluation order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{MembraneGeometry, RATIO_MATCH_TOLERANCE};

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_SAMPLES: usize = 10_000;
pub const MIN_SAMPLES: usize = 100;

/// Which geometric quantities are resampled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PerturbFlags {
    pub half_width: bool,
    pub half_length: bool,
    pub thickness: bool,
}

impl Default for PerturbFlags {
    fn default() -> Self {
        PerturbFlags {
            half_width: true,
            half_length: true,
            thickness: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct UncertaintySpec {
    pub n_samples: usize,
    pub seed: u64,
    #[serde(default)]
    pub perturb: PerturbFlags,
}

impl Default for UncertaintySpec {
    fn default() -> Self {
        UncertaintySpec {
            n_samples: DEFAULT_SAMPLES,
            seed: DEFAULT_SEED,
            perturb: PerturbFlags::default(),
        }
    }
}

impl UncertaintySpec {
    pub fn new(n_samples: usize, seed: u64) -> Self {
        UncertaintySpec {
            n_samples,
            seed,
            perturb: PerturbFlags::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_samples < MIN_SAMPLES {
            return Err(Error::invalid(format!(
                "Monte-Carlo needs at least {MIN_SAMPLES} samples, got {}",
                self.n_samples
            )));
        }
        Ok(())
    }
}

pub fn draw_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Gaussian draw truncated at ±4σ and at strict positivity (when `mean`
/// is positive). `sd = 0` returns `mean` exactly.
pub fn truncated_normal(rng: &mut ChaCha8Rng, mean: f64, sd: f64) -> f64 {
    draw_normal(rng, mean, sd, mean > 0.0)
}

/// Gaussian draw truncated at ±4σ only.
pub fn signed_normal(rng: &mut ChaCha8Rng, mean: f64, sd: f64) -> f64 {
    draw_normal(rng, mean, sd, false)
}

fn draw_normal(rng: &mut ChaCha8Rng, mean: f64, sd: f64, positive: bool) -> f64 {
    if sd == 0.0 {
        return mean;
    }
    loop {
        let z: f64 = StandardNormal.sample(rng);
        if z.abs() > 4.0 {
            continue;
        }
        let v = mean + sd * z;
        if positive && v <= 0.0 {
            continue;
        }
        return v;
    }
}

/// Sample standard deviation (n − 1). Identical values give exactly 0.
pub fn sample_std(values: &[f64]) -> f64 {
    if values.len() < 2 || values.iter().all(|v| v.to_bits() == values[0].to_bits()) {
        return 0.0;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
}

/// Outputs of the successful draws plus the failure count. Errors when
/// more than 10% of the draws fail.
pub fn run_draws<T>(spec: &UncertaintySpec, mut draw: impl FnMut(&mut ChaCha8Rng) -> Result<T>) -> Result<(Vec<T>, usize)> {
    spec.validate()?;
    let mut ok = Vec::with_capacity(spec.n_samples);
    let mut failed = 0;
    for i in 0..spec.n_samples {
        let mut rng = draw_rng(spec.seed, i);
        match draw(&mut rng) {
            Ok(v) => ok.push(v),
            Err(e) => {
                log::debug!("Monte-Carlo draw {i} failed: {e}");
                failed += 1;
            }
        }
    }
    if failed * 10 > spec.n_samples {
        return Err(Error::TooManyFailedDraws {
            failed,
            total: spec.n_samples,
        });
    }
    Ok((ok, failed))
}

/// Resample a geometry. A square membrane stays square: its single side is
/// drawn from the half-width uncertainty.
pub fn perturb_geometry(geometry: &MembraneGeometry, flags: &PerturbFlags, rng: &mut ChaCha8Rng) -> Result<MembraneGeometry> {
    let pick = |on: bool, sd: f64| if on { sd } else { 0.0 };
    let a = truncated_normal(rng, geometry.half_width(), pick(flags.half_width, geometry.u_half_width()));
    let b = if (geometry.aspect_ratio() - 1.0).abs() <= RATIO_MATCH_TOLERANCE {
        a
    } else {
        truncated_normal(rng, geometry.half_length(), pick(flags.half_length, geometry.u_half_length()))
    };
    let t = truncated_normal(rng, geometry.thickness(), pick(flags.thickness, geometry.u_thickness()));
    MembraneGeometry::with_dimensions(
        a,
        b,
        t,
        geometry.u_half_width(),
        geometry.u_half_length(),
        geometry.u_thickness(),
    )
}

/// True when the flags select at least one nonzero uncertainty.
pub fn perturbs_anything(geometry: &MembraneGeometry, flags: &PerturbFlags) -> bool {
    (flags.half_width && geometry.u_half_width() > 0.0)
        || (flags.half_length && geometry.u_half_length() > 0.0)
        || (flags.thickness && geometry.u_thickness() > 0.0)
}
