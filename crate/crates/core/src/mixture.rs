//! Thickness-weighted mixture law for multilayer films.
//!
//! `M_composite = Σ (tᵢ / t_total)·Mᵢ`, and its inverse for a single
//! unknown layer.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Layer, LayerStack};
use crate::montecarlo::{run_draws, sample_std, signed_normal, truncated_normal, UncertaintySpec};

/// Which property the mixture law is applied to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PropertyMode {
    #[default]
    BiaxialModulus,
    ResidualStress,
    YoungsModulus,
    PoissonRatio,
}

impl PropertyMode {
    pub const ALL: [PropertyMode; 4] = [
        PropertyMode::BiaxialModulus,
        PropertyMode::ResidualStress,
        PropertyMode::YoungsModulus,
        PropertyMode::PoissonRatio,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PropertyMode::BiaxialModulus => "biaxial_modulus",
            PropertyMode::ResidualStress => "residual_stress",
            PropertyMode::YoungsModulus => "youngs_modulus",
            PropertyMode::PoissonRatio => "poisson_ratio",
        }
    }

    /// `"Pa"` or `""` for the dimensionless ratio.
    pub fn unit(self) -> &'static str {
        match self {
            PropertyMode::PoissonRatio => "",
            _ => "Pa",
        }
    }

    /// Caveat attached to results for properties the law does not strictly
    /// apply to.
    pub fn validity_note(self) -> Option<&'static str> {
        match self {
            PropertyMode::BiaxialModulus | PropertyMode::ResidualStress => None,
            PropertyMode::YoungsModulus => Some(
                "thickness weighting is exact for the biaxial modulus and residual stress; applied to E alone it is an approximation",
            ),
            PropertyMode::PoissonRatio => Some(
                "thickness weighting is exact for the biaxial modulus and residual stress; applied to nu alone it is an approximation",
            ),
        }
    }
}

impl fmt::Display for PropertyMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PropertyMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        Ok(match key.as_str() {
            "biaxial_modulus" | "biaxial" => PropertyMode::BiaxialModulus,
            "residual_stress" | "stress" | "sigma0" => PropertyMode::ResidualStress,
            "youngs_modulus" | "e" | "young" => PropertyMode::YoungsModulus,
            "poisson_ratio" | "nu" | "poisson" => PropertyMode::PoissonRatio,
            _ => {
                return Err(Error::Usage(format!(
                    "unknown property mode '{s}' (expected one of biaxial_modulus, residual_stress, youngs_modulus, poisson_ratio)"
                )))
            }
        })
    }
}

/// Composite property of a fully specified stack.
pub fn compose(stack: &LayerStack) -> Result<f64> {
    let mut sum = 0.0;
    for layer in stack.layers() {
        let value = layer.value.ok_or_else(|| Error::MissingValue {
            name: layer.name.clone(),
        })?;
        sum += layer.thickness * value;
    }
    Ok(sum / stack.total_thickness())
}

/// Property of the single unknown layer that reproduces `composite`.
pub fn decompose_unknown(composite: f64, stack: &LayerStack) -> Result<f64> {
    let unknown = stack.unknown_indices();
    if unknown.len() != 1 {
        return Err(Error::MultipleUnknowns { count: unknown.len() });
    }
    let k = unknown[0];
    let known: f64 = stack
        .layers()
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != k)
        .map(|(_, l)| l.thickness * l.value.unwrap_or_default())
        .sum();
    Ok((stack.total_thickness() * composite - known) / stack.layers()[k].thickness)
}

/// A value with its 1-σ uncertainty.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Measured {
    pub value: f64,
    #[serde(default)]
    pub uncertainty: f64,
}

impl Measured {
    pub fn exact(value: f64) -> Self {
        Measured { value, uncertainty: 0.0 }
    }

    pub fn new(value: f64, uncertainty: f64) -> Result<Self> {
        if !value.is_finite() || !(uncertainty.is_finite() && uncertainty >= 0.0) {
            return Err(Error::invalid(format!(
                "value {value} with uncertainty {uncertainty} is not a valid measurement"
            )));
        }
        Ok(Measured { value, uncertainty })
    }
}

/// One layer with uncertain thickness and, unless it is the unknown, an
/// uncertain property value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerInput {
    pub name: String,
    /// m
    pub thickness: Measured,
    pub value: Option<Measured>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionResult {
    pub unknown_layer: String,
    pub value: f64,
    pub uncertainty: f64,
    pub failed_draws: usize,
}

fn nominal_stack(layers: &[LayerInput]) -> Result<LayerStack> {
    LayerStack::new(
        layers
            .iter()
            .map(|l| Layer {
                name: l.name.clone(),
                thickness: l.thickness.value,
                value: l.value.map(|v| v.value),
            })
            .collect(),
    )
}

/// [`decompose_unknown`] with Monte-Carlo propagation of every input
/// uncertainty. Thicknesses stay positive; values may change sign.
pub fn decompose_with_uncertainty(
    composite: Measured,
    layers: &[LayerInput],
    spec: &UncertaintySpec,
) -> Result<DecompositionResult> {
    let nominal = nominal_stack(layers)?;
    let value = decompose_unknown(composite.value, &nominal)?;
    let unknown_layer = nominal.layers()[nominal.unknown_indices()[0]].name.clone();

    let uncertain = composite.uncertainty > 0.0
        || layers
            .iter()
            .any(|l| l.thickness.uncertainty > 0.0 || l.value.is_some_and(|v| v.uncertainty > 0.0));
    if !uncertain {
        return Ok(DecompositionResult {
            unknown_layer,
            value,
            uncertainty: 0.0,
            failed_draws: 0,
        });
    }

    let (draws, failed) = run_draws(spec, |rng| {
        let c = signed_normal(rng, composite.value, composite.uncertainty);
        let drawn = layers
            .iter()
            .map(|l| Layer {
                name: l.name.clone(),
                thickness: truncated_normal(rng, l.thickness.value, l.thickness.uncertainty),
                value: l.value.map(|v| signed_normal(rng, v.value, v.uncertainty)),
            })
            .collect();
        let stack = LayerStack::new(drawn)?;
        decompose_unknown(c, &stack)
    })?;
    Ok(DecompositionResult {
        unknown_layer,
        value,
        uncertainty: sample_std(&draws),
        failed_draws: failed,
    })
}


/// A decomposition together with its inputs, as written to reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureReport {
    pub mode: PropertyMode,
    /// Unit of `composite`, layer values and the result.
    pub unit: String,
    pub composite: Measured,
    pub layers: Vec<LayerInput>,
    pub result: DecompositionResult,
    pub note: Option<String>,
}

impl MixtureReport {
    pub fn run(mode: PropertyMode, composite: Measured, layers: Vec<LayerInput>, spec: &UncertaintySpec) -> Result<Self> {
        let result = decompose_with_uncertainty(composite, &layers, spec)?;
        Ok(MixtureReport {
            mode,
            unit: mode.unit().to_string(),
            composite,
            layers,
            result,
            note: mode.validity_note().map(str::to_string),
        })
    }
}
