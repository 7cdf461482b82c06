//! Domain types, shape coefficients and the forward load-deflection model.

mod coefficients;
mod forward;
mod geometry;
mod layers;
mod material;

pub use coefficients::{
    alpha_for, coefficients_for, coefficients_with_table, default_table, f_square_vlassak_nix, f_strip,
    CoefficientSource, ShapeCoefficients, DATA_DIR_ENV, RATIO_MATCH_TOLERANCE, STRIP_ASPECT_RATIO,
    TABLE_FILE_NAME,
};
pub use forward::{
    forward_deflection, forward_deflection_with, forward_pressure, forward_pressure_with, LoadDeflectionLaw,
};
pub use geometry::MembraneGeometry;
pub use layers::{Layer, LayerStack};
pub use material::{check_poisson_ratio, MaterialParams};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ordered `(pressure [Pa], deflection [m])` samples. The origin is implied.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PressureDeflectionCurve {
    samples: Vec<(f64, f64)>,
    pub label: String,
}

impl PressureDeflectionCurve {
    /// Pressures must be strictly increasing and everything non-negative;
    /// an explicit origin sample may only appear first.
    pub fn new(samples: Vec<(f64, f64)>, label: impl Into<String>) -> Result<Self> {
        for (i, &(p, h)) in samples.iter().enumerate() {
            if !(p.is_finite() && h.is_finite()) {
                return Err(Error::invalid(format!("sample {i} is not finite")));
            }
            if p < 0.0 || h < 0.0 {
                return Err(Error::invalid(format!("sample {i} ({p} Pa, {h} m) is negative")));
            }
            if i > 0 && p <= samples[i - 1].0 {
                return Err(Error::invalid(format!(
                    "pressures must be strictly increasing (sample {i}: {p} Pa after {} Pa)",
                    samples[i - 1].0
                )));
            }
        }
        Ok(PressureDeflectionCurve {
            samples,
            label: label.into(),
        })
    }

    pub fn samples(&self) -> &[(f64, f64)] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Same curve with every pressure multiplied by `k > 0`.
    pub fn scale_pressures(&self, k: f64) -> Result<Self> {
        Self::new(self.samples.iter().map(|&(p, h)| (p * k, h)).collect(), self.label.clone())
    }

    /// Sample the law at the given pressures.
    pub fn synthesize(law: &LoadDeflectionLaw, pressures: &[f64], label: impl Into<String>) -> Result<Self> {
        let samples = pressures
            .iter()
            .map(|&p| Ok((p, law.deflection(p)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(samples, label)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curve_invariants() {
        assert!(PressureDeflectionCurve::new(vec![(0.0, 0.0), (1.0, 1e-6)], "").is_ok());
        assert!(PressureDeflectionCurve::new(vec![(1.0, 1e-6), (1.0, 2e-6)], "").is_err());
        assert!(PressureDeflectionCurve::new(vec![(2.0, 1e-6), (1.0, 2e-6)], "").is_err());
        assert!(PressureDeflectionCurve::new(vec![(1.0, -1e-6)], "").is_err());
    }
}
