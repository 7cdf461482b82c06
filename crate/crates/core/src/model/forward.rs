use super::coefficients::{coefficients_for, CoefficientSource, ShapeCoefficients};
use super::geometry::MembraneGeometry;
use super::material::MaterialParams;
use crate::error::{Error, Result};

/// `P(h) = linear·h + cubic·h³` for one membrane and material.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoadDeflectionLaw {
    /// Pa/m; includes the bending contribution when it was requested.
    pub linear: f64,
    /// Pa/m³.
    pub cubic: f64,
}

impl LoadDeflectionLaw {
    pub fn new(
        geometry: &MembraneGeometry,
        material: &MaterialParams,
        source: CoefficientSource,
        include_bending: bool,
    ) -> Result<Self> {
        let coeffs = coefficients_for(geometry.aspect_ratio(), material.poisson_ratio(), source)?;
        Ok(Self::from_coefficients(geometry, material, &coeffs, include_bending))
    }

    pub fn from_coefficients(
        geometry: &MembraneGeometry,
        material: &MaterialParams,
        coeffs: &ShapeCoefficients,
        include_bending: bool,
    ) -> Self {
        let a = geometry.half_width();
        let t = geometry.thickness();
        let e = material.youngs_modulus();
        let nu = material.poisson_ratio();
        let a2 = a * a;
        let a4 = a2 * a2;

        let mut linear = coeffs.c1 * t * material.residual_stress() / a2;
        if include_bending {
            linear += e / (12.0 * coeffs.alpha * (1.0 - nu * nu)) * (t * t * t / a4);
        }
        let cubic = coeffs.f * (t / a4) * (e / (1.0 - nu));
        LoadDeflectionLaw { linear, cubic }
    }

    pub fn pressure(&self, deflection: f64) -> f64 {
        self.linear * deflection + self.cubic * deflection * deflection * deflection
    }

    /// The unique `h ≥ 0` with `pressure(h) = p`.
    ///
    /// Brackets the root in `[0, max(p/linear, (p/cubic)^⅓)]` and refines it
    /// with Newton steps that fall back to bisection when they leave the
    /// bracket.
    pub fn deflection(&self, p: f64) -> Result<f64> {
        if !(p.is_finite() && p >= 0.0) {
            return Err(Error::invalid(format!("pressure must be non-negative, got {p}")));
        }
        if self.linear < 0.0 || (self.linear == 0.0 && self.cubic <= 0.0) {
            return Err(Error::NonMonotoneModel { linear: self.linear });
        }
        if p == 0.0 {
            return Ok(0.0);
        }
        if self.cubic == 0.0 {
            return Ok(p / self.linear);
        }
        let from_linear = if self.linear > 0.0 { p / self.linear } else { 0.0 };
        let from_cubic = (p / self.cubic).cbrt();
        let mut lo = 0.0_f64;
        let mut hi = from_linear.max(from_cubic);
        // g is convex on h ≥ 0, so Newton from the upper end decreases monotonically.
        let mut h = hi;
        for _ in 0..200 {
            let g = self.pressure(h) - p;
            if g > 0.0 {
                hi = h;
            } else if g < 0.0 {
                lo = h;
            } else {
                return Ok(h);
            }
            let slope = self.linear + 3.0 * self.cubic * h * h;
            let mut next = h - g / slope;
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - h).abs() <= 1e-15 * next.abs() || hi - lo <= 1e-15 * hi {
                return Ok(next);
            }
            h = next;
        }
        Ok(h)
    }
}

/// Pressure needed for centre deflection `h` (Vlassak–Nix coefficients).
pub fn forward_pressure(
    geometry: &MembraneGeometry,
    material: &MaterialParams,
    deflection: f64,
    include_bending: bool,
) -> Result<f64> {
    forward_pressure_with(geometry, material, deflection, include_bending, CoefficientSource::default())
}

pub fn forward_pressure_with(
    geometry: &MembraneGeometry,
    material: &MaterialParams,
    deflection: f64,
    include_bending: bool,
    source: CoefficientSource,
) -> Result<f64> {
    if !(deflection.is_finite() && deflection >= 0.0) {
        return Err(Error::invalid(format!("deflection must be non-negative, got {deflection}")));
    }
    Ok(LoadDeflectionLaw::new(geometry, material, source, include_bending)?.pressure(deflection))
}

/// Centre deflection under pressure `p` (Vlassak–Nix coefficients).
///
/// Without the bending term a compressive residual stress has no
/// monotone branch and is rejected with [`Error::NonMonotoneModel`].
pub fn forward_deflection(
    geometry: &MembraneGeometry,
    material: &MaterialParams,
    pressure: f64,
    include_bending: bool,
) -> Result<f64> {
    forward_deflection_with(geometry, material, pressure, include_bending, CoefficientSource::default())
}

pub fn forward_deflection_with(
    geometry: &MembraneGeometry,
    material: &MaterialParams,
    pressure: f64,
    include_bending: bool,
    source: CoefficientSource,
) -> Result<f64> {
    let law = LoadDeflectionLaw::new(geometry, material, source, include_bending)?;
    if !include_bending && material.residual_stress() < 0.0 {
        return Err(Error::NonMonotoneModel { linear: law.linear });
    }
    law.deflection(pressure)
}
