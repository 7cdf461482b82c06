use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Lateral half-dimensions and thickness of one rectangular membrane, in
/// metres, with their 1-σ uncertainties.
///
/// `half_width` is always the short half-dimension: constructing with the
/// two lateral dimensions in the wrong order swaps them (and their
/// uncertainties).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGeometry", into = "RawGeometry")]
pub struct MembraneGeometry {
    half_width: f64,
    half_length: f64,
    thickness: f64,
    u_half_width: f64,
    u_half_length: f64,
    u_thickness: f64,
}

#[derive(Serialize, Deserialize)]
struct RawGeometry {
    half_width: f64,
    half_length: f64,
    thickness: f64,
    #[serde(default)]
    u_half_width: f64,
    #[serde(default)]
    u_half_length: f64,
    #[serde(default)]
    u_thickness: f64,
}

impl TryFrom<RawGeometry> for MembraneGeometry {
    type Error = Error;

    fn try_from(r: RawGeometry) -> Result<Self> {
        MembraneGeometry::new(r.half_width, r.half_length, r.thickness)?.with_uncertainties(
            r.u_half_width,
            r.u_half_length,
            r.u_thickness,
        )
    }
}

impl From<MembraneGeometry> for RawGeometry {
    fn from(g: MembraneGeometry) -> Self {
        RawGeometry {
            half_width: g.half_width,
            half_length: g.half_length,
            thickness: g.thickness,
            u_half_width: g.u_half_width,
            u_half_length: g.u_half_length,
            u_thickness: g.u_thickness,
        }
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} must be positive and finite, got {v}")))
    }
}

impl MembraneGeometry {
    /// Half-dimensions `a`, `b` and thickness `t`, all in metres.
    pub fn new(half_width: f64, half_length: f64, thickness: f64) -> Result<Self> {
        positive("half width", half_width)?;
        positive("half length", half_length)?;
        positive("thickness", thickness)?;
        let (a, b) = if half_width <= half_length {
            (half_width, half_length)
        } else {
            (half_length, half_width)
        };
        Ok(MembraneGeometry {
            half_width: a,
            half_length: b,
            thickness,
            u_half_width: 0.0,
            u_half_length: 0.0,
            u_thickness: 0.0,
        })
    }

    /// Full width `2a`, full length `2b` and thickness, all in metres.
    pub fn from_full_dimensions(width: f64, length: f64, thickness: f64) -> Result<Self> {
        Self::new(width / 2.0, length / 2.0, thickness)
    }

    /// Attach 1-σ uncertainties of `a`, `b` and `t`. The first two are
    /// given in the same order as the constructor arguments and follow the
    /// dimensions through the a ≤ b normalization only if those were
    /// already ordered; pass them as (short, long).
    pub fn with_uncertainties(mut self, u_half_width: f64, u_half_length: f64, u_thickness: f64) -> Result<Self> {
        for (name, v) in [
            ("half-width uncertainty", u_half_width),
            ("half-length uncertainty", u_half_length),
            ("thickness uncertainty", u_thickness),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::invalid(format!("{name} must be non-negative, got {v}")));
            }
        }
        self.u_half_width = u_half_width;
        self.u_half_length = u_half_length;
        self.u_thickness = u_thickness;
        Ok(self)
    }

    /// Build from possibly unordered dimensions and matching uncertainties;
    /// swaps both pairs together when `a > b`.
    pub fn with_dimensions(
        half_width: f64,
        half_length: f64,
        thickness: f64,
        u_half_width: f64,
        u_half_length: f64,
        u_thickness: f64,
    ) -> Result<Self> {
        let g = Self::new(half_width, half_length, thickness)?;
        if half_width <= half_length {
            g.with_uncertainties(u_half_width, u_half_length, u_thickness)
        } else {
            g.with_uncertainties(u_half_length, u_half_width, u_thickness)
        }
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn half_length(&self) -> f64 {
        self.half_length
    }

    pub fn thickness(&self) -> f64 {
        self.thickness
    }

    pub fn u_half_width(&self) -> f64 {
        self.u_half_width
    }

    pub fn u_half_length(&self) -> f64 {
        self.u_half_length
    }

    pub fn u_thickness(&self) -> f64 {
        self.u_thickness
    }

    /// `b / a`, always ≥ 1.
    pub fn aspect_ratio(&self) -> f64 {
        self.half_length / self.half_width
    }

    pub fn has_uncertainties(&self) -> bool {
        self.u_half_width > 0.0 || self.u_half_length > 0.0 || self.u_thickness > 0.0
    }

    /// Same membrane with a different thickness (uncertainties kept).
    pub fn with_thickness(mut self, thickness: f64) -> Result<Self> {
        positive("thickness", thickness)?;
        self.thickness = thickness;
        Ok(self)
    }
}
