use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Isotropic film properties in SI units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMaterial", into = "RawMaterial")]
pub struct MaterialParams {
    youngs_modulus: f64,
    poisson_ratio: f64,
    residual_stress: f64,
}

#[derive(Serialize, Deserialize)]
struct RawMaterial {
    youngs_modulus: f64,
    poisson_ratio: f64,
    residual_stress: f64,
}

impl TryFrom<RawMaterial> for MaterialParams {
    type Error = Error;
    fn try_from(r: RawMaterial) -> Result<Self> {
        MaterialParams::new(r.youngs_modulus, r.poisson_ratio, r.residual_stress)
    }
}

impl From<MaterialParams> for RawMaterial {
    fn from(m: MaterialParams) -> Self {
        RawMaterial {
            youngs_modulus: m.youngs_modulus,
            poisson_ratio: m.poisson_ratio,
            residual_stress: m.residual_stress,
        }
    }
}

/// Checks −1 < ν < 0.5.
pub fn check_poisson_ratio(nu: f64) -> Result<()> {
    if nu > -1.0 && nu < 0.5 {
        Ok(())
    } else {
        Err(Error::invalid(format!("Poisson's ratio must lie in (-1, 0.5), got {nu}")))
    }
}

impl MaterialParams {
    /// `youngs_modulus` and `residual_stress` in Pa. Negative residual
    /// stress means compression.
    pub fn new(youngs_modulus: f64, poisson_ratio: f64, residual_stress: f64) -> Result<Self> {
        if !(youngs_modulus.is_finite() && youngs_modulus > 0.0) {
            return Err(Error::invalid(format!("Young's modulus must be positive, got {youngs_modulus}")));
        }
        check_poisson_ratio(poisson_ratio)?;
        if !residual_stress.is_finite() {
            return Err(Error::invalid("residual stress must be finite"));
        }
        Ok(MaterialParams {
            youngs_modulus,
            poisson_ratio,
            residual_stress,
        })
    }

    pub fn youngs_modulus(&self) -> f64 {
        self.youngs_modulus
    }

    pub fn poisson_ratio(&self) -> f64 {
        self.poisson_ratio
    }

    pub fn residual_stress(&self) -> f64 {
        self.residual_stress
    }

    /// E / (1 − ν).
    pub fn biaxial_modulus(&self) -> f64 {
        self.youngs_modulus / (1.0 - self.poisson_ratio)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounds() {
        assert!(MaterialParams::new(1e11, 0.3, -1e8).is_ok());
        assert!(MaterialParams::new(0.0, 0.3, 0.0).is_err());
        assert!(MaterialParams::new(1e11, 0.5, 0.0).is_err());
        assert!(MaterialParams::new(1e11, -1.0, 0.0).is_err());
    }
}
