//! Linearized load-deflection fitting.
//!
//! Dividing `P = A·h + B·h³` by `h` gives a straight line in `(h², P/h)`
//! whose intercept `A` carries the residual stress and whose slope `B`
//! carries the biaxial modulus.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{coefficients_for, CoefficientSource, MembraneGeometry, PressureDeflectionCurve, ShapeCoefficients};
use crate::montecarlo::{perturb_geometry, perturbs_anything, run_draws, sample_std, UncertaintySpec};

/// Default assumed Poisson's ratio.
pub const DEFAULT_NU: f64 = 0.3;

/// Default lower deflection cut, in units of film thickness.
pub const DEFAULT_MIN_DEFLECTION_OVER_T: f64 = 10.0;

/// `(h², P/h)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearizedPoint {
    /// m²
    pub x: f64,
    /// Pa/m
    pub y: f64,
}

/// Keep samples with `h > min_deflection` and map them to `(h², P/h)`.
pub fn linearize(curve: &PressureDeflectionCurve, min_deflection: f64) -> Result<Vec<LinearizedPoint>> {
    let points: Vec<LinearizedPoint> = curve
        .samples()
        .iter()
        .filter(|&&(_, h)| h > min_deflection && h > 0.0)
        .map(|&(p, h)| LinearizedPoint { x: h * h, y: p / h })
        .collect();
    if points.len() < 3 {
        return Err(Error::TooFewPoints { found: points.len() });
    }
    Ok(points)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineFit {
    pub intercept: f64,
    pub slope: f64,
    pub r_squared: f64,
}

/// Ordinary least squares of `y` on `x`.
pub fn fit_line(points: &[LinearizedPoint]) -> Result<LineFit> {
    if points.len() < 3 {
        return Err(Error::TooFewPoints { found: points.len() });
    }
    let x0 = points[0].x;
    if points.iter().all(|p| p.x == x0) {
        return Err(Error::DegenerateAbscissa);
    }
    let y0 = points[0].y;
    if points.iter().all(|p| p.y == y0) {
        return Ok(LineFit {
            intercept: y0,
            slope: 0.0,
            r_squared: 1.0,
        });
    }
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.x).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.y).sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for p in points {
        let (dx, dy) = (p.x - mean_x, p.y - mean_y);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_res: f64 = points
        .iter()
        .map(|p| (p.y - intercept - slope * p.x).powi(2))
        .sum();
    let r_squared = if ss_res == 0.0 || syy == 0.0 {
        1.0
    } else {
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    };
    Ok(LineFit {
        intercept,
        slope,
        r_squared,
    })
}

/// Fitted line and the film properties derived from it.
///
/// `sigma0 = intercept·a²/(c1·t)` and `biaxial_modulus = slope·a⁴/(f·t)`
/// hold exactly for the stored values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub label: String,
    /// Pa/m
    pub intercept: f64,
    /// Pa/m³
    pub slope: f64,
    /// Pa
    pub sigma0: f64,
    /// E/(1−ν), Pa
    pub biaxial_modulus: f64,
    /// Pa, valid for `nu_assumed`
    pub youngs_modulus: f64,
    pub nu_assumed: f64,
    pub r_squared: f64,
    pub points_used: usize,
    /// Geometry-driven 1-σ uncertainty of `sigma0`, Pa.
    pub u_sigma0: f64,
    /// Geometry-driven 1-σ uncertainty of `youngs_modulus`, Pa.
    pub u_youngs_modulus: f64,
    pub geometry: MembraneGeometry,
    /// Source that was requested; `coefficients.source` records what
    /// actually served the values.
    pub coefficient_source: CoefficientSource,
    pub coefficients: ShapeCoefficients,
}

/// Turn intercept and slope into `σ₀`, `E/(1−ν)` and `E`.
pub fn extract_parameters(
    intercept: f64,
    slope: f64,
    geometry: &MembraneGeometry,
    nu_assumed: f64,
    source: CoefficientSource,
) -> Result<FitResult> {
    if !(intercept.is_finite() && intercept > 0.0) {
        return Err(Error::invalid(format!("intercept must be positive, got {intercept} Pa/m")));
    }
    if !(slope.is_finite() && slope > 0.0) {
        return Err(Error::invalid(format!(
            "slope must be positive, got {slope} Pa/m^3; a linear curve carries no stiffness information"
        )));
    }
    let coeffs = coefficients_for(geometry.aspect_ratio(), nu_assumed, source)?;
    let a = geometry.half_width();
    let t = geometry.thickness();
    let sigma0 = intercept * a * a / (coeffs.c1 * t);
    let biaxial_modulus = slope * a.powi(4) / (coeffs.f * t);
    Ok(FitResult {
        label: String::new(),
        intercept,
        slope,
        sigma0,
        biaxial_modulus,
        youngs_modulus: (1.0 - nu_assumed) * biaxial_modulus,
        nu_assumed,
        r_squared: 1.0,
        points_used: 0,
        u_sigma0: 0.0,
        u_youngs_modulus: 0.0,
        geometry: *geometry,
        coefficient_source: source,
        coefficients: coeffs,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    pub nu_assumed: f64,
    pub source: CoefficientSource,
    /// m; `None` means `10·t`.
    pub min_deflection: Option<f64>,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            nu_assumed: DEFAULT_NU,
            source: CoefficientSource::default(),
            min_deflection: None,
        }
    }
}

impl FitOptions {
    pub fn min_deflection_for(&self, geometry: &MembraneGeometry) -> f64 {
        self.min_deflection
            .unwrap_or(DEFAULT_MIN_DEFLECTION_OVER_T * geometry.thickness())
    }
}

/// Linearize, fit and extract in one go.
pub fn fit_curve(curve: &PressureDeflectionCurve, geometry: &MembraneGeometry, options: &FitOptions) -> Result<FitResult> {
    let points = linearize(curve, options.min_deflection_for(geometry))?;
    let line = fit_line(&points)?;
    let mut result = extract_parameters(line.intercept, line.slope, geometry, options.nu_assumed, options.source)?;
    result.label = curve.label.clone();
    result.r_squared = line.r_squared;
    result.points_used = points.len();
    Ok(result)
}

/// Geometry-driven uncertainty of a fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeometryUncertainty {
    pub u_sigma0: f64,
    pub u_youngs_modulus: f64,
    pub failed_draws: usize,
}

/// Resample the geometry within its uncertainties, refit each draw and
/// report the spread of `σ₀` and `E`.
pub fn propagate_uncertainty(
    curve: &PressureDeflectionCurve,
    geometry: &MembraneGeometry,
    options: &FitOptions,
    spec: &UncertaintySpec,
) -> Result<GeometryUncertainty> {
    spec.validate()?;
    if !perturbs_anything(geometry, &spec.perturb) {
        return Ok(GeometryUncertainty {
            u_sigma0: 0.0,
            u_youngs_modulus: 0.0,
            failed_draws: 0,
        });
    }
    let (draws, failed) = run_draws(spec, |rng| {
        let g = perturb_geometry(geometry, &spec.perturb, rng)?;
        let fit = fit_curve(curve, &g, options)?;
        Ok((fit.sigma0, fit.youngs_modulus))
    })?;
    let sigma0: Vec<f64> = draws.iter().map(|d| d.0).collect();
    let modulus: Vec<f64> = draws.iter().map(|d| d.1).collect();
    Ok(GeometryUncertainty {
        u_sigma0: sample_std(&sigma0),
        u_youngs_modulus: sample_std(&modulus),
        failed_draws: failed,
    })
}

/// [`fit_curve`] with the uncertainty fields filled in.
pub fn fit_curve_with_uncertainty(
    curve: &PressureDeflectionCurve,
    geometry: &MembraneGeometry,
    options: &FitOptions,
    spec: &UncertaintySpec,
) -> Result<FitResult> {
    let mut fit = fit_curve(curve, geometry, options)?;
    let u = propagate_uncertainty(curve, geometry, options, spec)?;
    fit.u_sigma0 = u.u_sigma0;
    fit.u_youngs_modulus = u.u_youngs_modulus;
    Ok(fit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{LoadDeflectionLaw, MaterialParams};
    use approx::assert_relative_eq;

    fn pts(v: &[(f64, f64)]) -> Vec<LinearizedPoint> {
        v.iter().map(|&(x, y)| LinearizedPoint { x, y }).collect()
    }

    #[test]
    fn linearize_single_sample() {
        let c = PressureDeflectionCurve::new(vec![(10.0, 1e-6), (20.0, 2e-6), (30.0, 3e-6)], "").unwrap();
        let p = linearize(&c, 0.0).unwrap();
        assert_eq!(p[0].x, 1e-12);
        assert_eq!(p[0].y, 1e7);
    }

    #[test]
    fn linearize_drops_zero_deflection() {
        let c = PressureDeflectionCurve::new(vec![(0.0, 0.0), (1.0, 1e-6), (2.0, 2e-6), (3.0, 3e-6)], "").unwrap();
        let p = linearize(&c, 0.0).unwrap();
        assert_eq!(p.len(), 3);
        assert!(p.iter().all(|p| p.y.is_finite()));
        let c = PressureDeflectionCurve::new(vec![(1.0, 1e-6), (2.0, 2e-6)], "").unwrap();
        assert!(matches!(linearize(&c, 0.0), Err(Error::TooFewPoints { found: 2 })));
    }

    #[test]
    fn exact_line() {
        let f = fit_line(&pts(&[(0.0, 2.0), (1.0, 5.0), (2.0, 8.0), (3.0, 11.0)])).unwrap();
        assert_relative_eq!(f.intercept, 2.0, epsilon = 1e-12);
        assert_relative_eq!(f.slope, 3.0, epsilon = 1e-12);
        assert_eq!(f.r_squared, 1.0);
    }

    #[test]
    fn horizontal_line() {
        let f = fit_line(&pts(&[(0.0, 0.7), (1.0, 0.7), (2.0, 0.7)])).unwrap();
        assert_eq!((f.intercept, f.slope, f.r_squared), (0.7, 0.0, 1.0));
    }

    #[test]
    fn degenerate_abscissa() {
        assert!(matches!(
            fit_line(&pts(&[(1.0, 0.0), (1.0, 1.0), (1.0, 2.0)])),
            Err(Error::DegenerateAbscissa)
        ));
    }

    #[test]
    fn stored_fields_are_consistent() {
        let g = MembraneGeometry::from_full_dimensions(2.131e-3, 2.131e-3, 104e-9).unwrap();
        let r = extract_parameters(4e8, 3e18, &g, 0.3, CoefficientSource::VlassakNix).unwrap();
        let a = g.half_width();
        let t = g.thickness();
        assert_eq!(r.sigma0, r.intercept * a * a / (r.coefficients.c1 * t));
        assert_eq!(r.biaxial_modulus, r.slope * a.powi(4) / (r.coefficients.f * t));
    }

    #[test]
    fn residual_stress_inverse() {
        let g = MembraneGeometry::from_full_dimensions(2.131e-3, 2.131e-3, 104e-9).unwrap();
        let a = g.half_width();
        let t = g.thickness();
        let intercept = 3.39 * t * 420e6 / (a * a);
        let r = extract_parameters(intercept, 1e18, &g, 0.3, CoefficientSource::VlassakNix).unwrap();
        assert_relative_eq!(r.sigma0, 420e6, max_relative = 1e-15);
    }

    #[test]
    fn zero_slope_rejected() {
        let g = MembraneGeometry::from_full_dimensions(2.131e-3, 2.131e-3, 104e-9).unwrap();
        assert!(extract_parameters(1e9, 0.0, &g, 0.3, CoefficientSource::VlassakNix).is_err());
    }

    #[test]
    fn strip_modulus_round_trip() {
        // 5B: 2a = 0.27 mm, 2b = 3.28 mm, t = 188 nm
        let g = MembraneGeometry::from_full_dimensions(0.27e-3, 3.28e-3, 188e-9).unwrap();
        let a = g.half_width();
        let slope = 8.0 / (6.0 * 1.3) * (g.thickness() / a.powi(4)) * (145e9 / 0.7);
        let r = extract_parameters(1e9, slope, &g, 0.3, CoefficientSource::VlassakNix).unwrap();
        assert_relative_eq!(r.youngs_modulus, 145e9, max_relative = 1e-14);
    }

    #[test]
    fn two_point_curve_too_few() {
        let g = MembraneGeometry::from_full_dimensions(2.131e-3, 2.131e-3, 104e-9).unwrap();
        let c = PressureDeflectionCurve::new(vec![(1000.0, 20e-6), (2000.0, 30e-6)], "").unwrap();
        assert!(matches!(
            fit_curve(&c, &g, &FitOptions::default()),
            Err(Error::TooFewPoints { .. })
        ));
    }

    #[test]
    fn zero_uncertainty_gives_zero() {
        let g = MembraneGeometry::from_full_dimensions(2.131e-3, 2.131e-3, 104e-9).unwrap();
        let m = MaterialParams::new(217e9, 0.3, 400e6).unwrap();
        let law = LoadDeflectionLaw::new(&g, &m, CoefficientSource::VlassakNix, false).unwrap();
        let pressures: Vec<f64> = (1..=20).map(|k| k as f64 * 5e3).collect();
        let c = PressureDeflectionCurve::synthesize(&law, &pressures, "2M").unwrap();
        let u = propagate_uncertainty(&c, &g, &FitOptions::default(), &UncertaintySpec::new(200, 1)).unwrap();
        assert_eq!((u.u_sigma0, u.u_youngs_modulus), (0.0, 0.0));
    }
}
