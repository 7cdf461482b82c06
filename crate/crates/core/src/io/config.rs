//! Experiment configuration files (JSON).
//!
//! ```json
//! {
//!   "label": "2M",
//!   "geometry": {
//!     "width_2a": 2.131, "length_2b": 2.131, "thickness_t": 104,
//!     "uncertainties": { "width_2a": 0.01, "length_2b": 0.01, "thickness_t": 0 },
//!     "units": { "lateral": "mm", "thickness": "nm" }
//!   },
//!   "material": { "youngs_modulus": 217, "poisson_ratio": 0.3, "residual_stress": 400,
//!                 "units": { "modulus": "GPa", "stress": "MPa" } },
//!   "analysis": { "nu_assumed": 0.3, "coefficient_source": "vlassak-nix", "min_deflection_over_t": 10 },
//!   "uncertainty": { "n_samples": 10000, "seed": 42 }
//! }
//! ```
//!
//! `geometry` may instead be `{ "bundled": "2M" }`. Uncertainties are 1-σ
//! values of the full dimensions. Only `geometry` is required.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fitting::{FitOptions, DEFAULT_MIN_DEFLECTION_OVER_T, DEFAULT_NU};
use crate::model::{CoefficientSource, MaterialParams, MembraneGeometry};
use crate::montecarlo::{UncertaintySpec, DEFAULT_SAMPLES, DEFAULT_SEED};

use super::dataset::bundled_membrane;
use super::read_text;
use super::units::{length_factor, pressure_factor};

/// Relative 1-σ lateral uncertainty used when a configuration gives none.
pub const DEFAULT_LATERAL_UNCERTAINTY: f64 = 0.005;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub label: Option<String>,
    pub geometry: GeometryBlock,
    #[serde(default)]
    pub material: Option<MaterialBlock>,
    #[serde(default)]
    pub analysis: AnalysisBlock,
    #[serde(default)]
    pub uncertainty: UncertaintyBlock,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GeometryBlock {
    Bundled {
        bundled: String,
        #[serde(default)]
        uncertainties: Option<DimensionUncertainties>,
    },
    Explicit {
        width_2a: f64,
        length_2b: f64,
        thickness_t: f64,
        #[serde(default)]
        uncertainties: Option<DimensionUncertainties>,
        #[serde(default)]
        units: LengthUnits,
    },
}

/// 1-σ uncertainties in the geometry block's units (millimetres and
/// nanometres for bundled membranes).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DimensionUncertainties {
    #[serde(default)]
    pub width_2a: f64,
    #[serde(default)]
    pub length_2b: f64,
    #[serde(default)]
    pub thickness_t: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LengthUnits {
    #[serde(default = "metre")]
    pub lateral: String,
    #[serde(default = "metre")]
    pub thickness: String,
}

fn metre() -> String {
    "m".into()
}

fn pascal() -> String {
    "Pa".into()
}

impl Default for LengthUnits {
    fn default() -> Self {
        LengthUnits {
            lateral: metre(),
            thickness: metre(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialBlock {
    pub youngs_modulus: f64,
    pub poisson_ratio: f64,
    pub residual_stress: f64,
    #[serde(default)]
    pub units: StressUnits,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StressUnits {
    #[serde(default = "pascal")]
    pub modulus: String,
    #[serde(default = "pascal")]
    pub stress: String,
}

impl Default for StressUnits {
    fn default() -> Self {
        StressUnits {
            modulus: pascal(),
            stress: pascal(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisBlock {
    #[serde(default = "default_nu")]
    pub nu_assumed: f64,
    #[serde(default)]
    pub coefficient_source: CoefficientSource,
    #[serde(default = "default_min_over_t")]
    pub min_deflection_over_t: f64,
}

fn default_nu() -> f64 {
    DEFAULT_NU
}

fn default_min_over_t() -> f64 {
    DEFAULT_MIN_DEFLECTION_OVER_T
}

impl Default for AnalysisBlock {
    fn default() -> Self {
        AnalysisBlock {
            nu_assumed: DEFAULT_NU,
            coefficient_source: CoefficientSource::default(),
            min_deflection_over_t: DEFAULT_MIN_DEFLECTION_OVER_T,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UncertaintyBlock {
    #[serde(default = "default_samples")]
    pub n_samples: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

fn default_samples() -> usize {
    DEFAULT_SAMPLES
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

impl Default for UncertaintyBlock {
    fn default() -> Self {
        UncertaintyBlock {
            n_samples: DEFAULT_SAMPLES,
            seed: DEFAULT_SEED,
        }
    }
}

/// A configuration with everything converted to SI and defaults applied.
#[derive(Debug, Clone, PartialEq)]
pub struct Experiment {
    pub label: String,
    pub geometry: MembraneGeometry,
    pub material: Option<MaterialParams>,
    pub fit_options: FitOptions,
    pub uncertainty: UncertaintySpec,
    /// Defaults that stand in for missing information.
    pub assumptions: Vec<String>,
}

impl ExperimentConfig {
    pub fn from_json_str(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|source| Error::Json {
            context: "experiment configuration".into(),
            source,
        })
    }

    pub fn resolve(&self) -> Result<Experiment> {
        let mut assumptions = Vec::new();
        let (width, length, thickness, given, scale, default_label) = match &self.geometry {
            GeometryBlock::Bundled { bundled, uncertainties } => {
                let b = bundled_membrane(bundled)?;
                (
                    b.width_2a_mm * 1e-3,
                    b.length_2b_mm * 1e-3,
                    b.thickness_nm * 1e-9,
                    *uncertainties,
                    (1e-3, 1e-9),
                    b.label.to_string(),
                )
            }
            GeometryBlock::Explicit {
                width_2a,
                length_2b,
                thickness_t,
                uncertainties,
                units,
            } => {
                let lateral = length_factor(&units.lateral)?;
                let thick = length_factor(&units.thickness)?;
                (
                    width_2a * lateral,
                    length_2b * lateral,
                    thickness_t * thick,
                    *uncertainties,
                    (lateral, thick),
                    String::new(),
                )
            }
        };
        let (u_w, u_l, u_t) = match given {
            Some(u) => (u.width_2a * scale.0, u.length_2b * scale.0, u.thickness_t * scale.1),
            None => {
                assumptions.push(format!(
                    "lateral dimension uncertainty not supplied; assumed {}% (1 sigma) of each dimension",
                    100.0 * DEFAULT_LATERAL_UNCERTAINTY
                ));
                (
                    DEFAULT_LATERAL_UNCERTAINTY * width,
                    DEFAULT_LATERAL_UNCERTAINTY * length,
                    0.0,
                )
            }
        };
        let geometry = MembraneGeometry::from_full_dimensions(width, length, thickness)?.with_uncertainties(
            0.5 * u_w,
            0.5 * u_l,
            u_t,
        )?;

        let material = match &self.material {
            Some(m) => Some(MaterialParams::new(
                m.youngs_modulus * pressure_factor(&m.units.modulus)?,
                m.poisson_ratio,
                m.residual_stress * pressure_factor(&m.units.stress)?,
            )?),
            None => None,
        };

        let a = &self.analysis;
        crate::model::check_poisson_ratio(a.nu_assumed)?;
        if !(a.min_deflection_over_t.is_finite() && a.min_deflection_over_t >= 0.0) {
            return Err(Error::invalid("min_deflection_over_t must be non-negative"));
        }
        let fit_options = FitOptions {
            nu_assumed: a.nu_assumed,
            source: a.coefficient_source,
            min_deflection: Some(a.min_deflection_over_t * geometry.thickness()),
        };
        let uncertainty = UncertaintySpec::new(self.uncertainty.n_samples, self.uncertainty.seed);
        uncertainty.validate()?;

        Ok(Experiment {
            label: self.label.clone().unwrap_or(default_label),
            geometry,
            material,
            fit_options,
            uncertainty,
            assumptions,
        })
    }
}

pub fn load_config(path: &Path) -> Result<Experiment> {
    let text = read_text(path)?;
    ExperimentConfig::from_json_str(&text)
        .map_err(|e| match e {
            Error::Json { source, .. } => Error::Json {
                context: path.display().to_string(),
                source,
            },
            other => other,
        })?
        .resolve()
}
