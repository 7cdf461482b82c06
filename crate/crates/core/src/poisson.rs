//! Poisson's ratio from a square and a rectangular membrane of the same film.
//!
//! With equal thickness and biaxial modulus, the cubic slopes of the two
//! membranes are in the ratio `[f_rect(ν)/f_square(ν)]·(a_square/a_rect)⁴`,
//! which depends on `ν` alone.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fitting::FitResult;
use crate::model::{coefficients_for, CoefficientSource, MembraneGeometry};
use crate::montecarlo::{perturb_geometry, perturbs_anything, run_draws, sample_std, UncertaintySpec};

/// Search interval for `ν`.
pub const NU_BRACKET: (f64, f64) = (-0.49, 0.49);
/// Largest aspect-ratio deviation from 1 still treated as square.
pub const SQUARE_TOLERANCE: f64 = 0.02;
/// Smallest usable aspect-ratio difference between the two membranes.
pub const MIN_RATIO_SEPARATION: f64 = 0.5;
/// Relative Young's modulus mismatch above which a warning is emitted.
pub const E_MISMATCH_WARNING: f64 = 0.10;

const BISECTION_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoissonSolveReport {
    pub nu: f64,
    pub delta_nu: f64,
    /// `slope_rect / slope_square`
    pub slope_ratio: f64,
    pub bracket: (f64, f64),
    pub iterations: usize,
    /// `(square, rect)`
    pub pair_labels: (String, String),
    pub coefficient_source: CoefficientSource,
    pub n_samples: usize,
    pub seed: u64,
    pub failed_draws: usize,
    pub warnings: Vec<String>,
}

fn check_pair(geom_rect: &MembraneGeometry, geom_square: &MembraneGeometry) -> Result<()> {
    let square = geom_square.aspect_ratio();
    if square - 1.0 > SQUARE_TOLERANCE {
        return Err(Error::NotSquare { ratio: square });
    }
    let rect = geom_rect.aspect_ratio();
    if rect - square < MIN_RATIO_SEPARATION {
        return Err(Error::ShapeTooSimilar { square, rect });
    }
    Ok(())
}

/// `[f_rect(ν)/f_square(ν)]·(a_square/a_rect)⁴ − slope_rect/slope_square`.
pub fn slope_ratio_residual(
    nu: f64,
    slope_rect: f64,
    slope_square: f64,
    geom_rect: &MembraneGeometry,
    geom_square: &MembraneGeometry,
    source: CoefficientSource,
) -> Result<f64> {
    if !(slope_rect > 0.0 && slope_square > 0.0) {
        return Err(Error::invalid("slopes must be positive"));
    }
    check_pair(geom_rect, geom_square)?;
    slope_ratio_residual_unchecked(nu, slope_rect / slope_square, geom_rect, geom_square, source)
}

/// The residual without the shape guards. The square membrane is
/// evaluated at `b/a = 1` exactly.
pub fn slope_ratio_residual_unchecked(
    nu: f64,
    slope_ratio: f64,
    geom_rect: &MembraneGeometry,
    geom_square: &MembraneGeometry,
    source: CoefficientSource,
) -> Result<f64> {
    let f_sq = coefficients_for(1.0, nu, source)?.f;
    let f_rect = coefficients_for(geom_rect.aspect_ratio(), nu, source)?.f;
    let side = geom_square.half_width() / geom_rect.half_width();
    Ok(f_rect / f_sq * side.powi(4) - slope_ratio)
}

struct Root {
    nu: f64,
    bracket: (f64, f64),
    iterations: usize,
}

fn bisect(mut g: impl FnMut(f64) -> Result<f64>) -> Result<Root> {
    let (mut lo, mut hi) = NU_BRACKET;
    let g_lo = g(lo)?;
    let g_hi = g(hi)?;
    if g_lo == 0.0 {
        return Ok(Root { nu: lo, bracket: (lo, lo), iterations: 0 });
    }
    if g_hi == 0.0 {
        return Ok(Root { nu: hi, bracket: (hi, hi), iterations: 0 });
    }
    if g_lo.signum() == g_hi.signum() || !(g_lo.is_finite() && g_hi.is_finite()) {
        return Err(Error::NoRootInBracket { lo, hi });
    }
    let lo_positive = g_lo > 0.0;
    let mut iterations = 0;
    while hi - lo > BISECTION_TOLERANCE {
        let mid = 0.5 * (lo + hi);
        let g_mid = g(mid)?;
        iterations += 1;
        if g_mid == 0.0 {
            return Ok(Root { nu: mid, bracket: (mid, mid), iterations });
        }
        if (g_mid > 0.0) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Root {
        nu: 0.5 * (lo + hi),
        bracket: (lo, hi),
        iterations,
    })
}

fn solve_geometries(
    slope_ratio: f64,
    geom_square: &MembraneGeometry,
    geom_rect: &MembraneGeometry,
    source: CoefficientSource,
) -> Result<Root> {
    bisect(|nu| slope_ratio_residual_unchecked(nu, slope_ratio, geom_rect, geom_square, source))
}

/// Solve for `ν` from a square and a rectangular fit; `Δν` is the spread of
/// the solution when both geometries are resampled within their
/// uncertainties.
pub fn solve_poisson(
    fit_square: &FitResult,
    fit_rect: &FitResult,
    source: CoefficientSource,
    spec: &UncertaintySpec,
) -> Result<PoissonSolveReport> {
    if fit_square.coefficient_source != source || fit_rect.coefficient_source != source {
        return Err(Error::invalid(format!(
            "both fits must use the {source} coefficients (got {} and {})",
            fit_square.coefficient_source, fit_rect.coefficient_source
        )));
    }
    let gs = fit_square.geometry;
    let gr = fit_rect.geometry;
    check_pair(&gr, &gs)?;
    if !(fit_square.slope > 0.0 && fit_rect.slope > 0.0) {
        return Err(Error::invalid("slopes must be positive"));
    }
    let slope_ratio = fit_rect.slope / fit_square.slope;
    let root = solve_geometries(slope_ratio, &gs, &gr, source)?;

    let mut warnings = Vec::new();
    let (e_sq, e_rect) = (fit_square.youngs_modulus, fit_rect.youngs_modulus);
    let mismatch = (e_sq - e_rect).abs() / (0.5 * (e_sq + e_rect));
    if mismatch > E_MISMATCH_WARNING {
        warnings.push(format!(
            "Young's moduli differ by {:.1}% ({:.1} vs {:.1} GPa); thickness or clamping may differ between the two membranes",
            100.0 * mismatch,
            e_sq * 1e-9,
            e_rect * 1e-9
        ));
    }

    let flags = spec.perturb;
    let (delta_nu, failed_draws) = if perturbs_anything(&gs, &flags) || perturbs_anything(&gr, &flags) {
        let (draws, failed) = run_draws(spec, |rng| {
            let s = perturb_geometry(&gs, &flags, rng)?;
            let r = perturb_geometry(&gr, &flags, rng)?;
            Ok(solve_geometries(slope_ratio, &s, &r, source)?.nu)
        })?;
        (sample_std(&draws), failed)
    } else {
        (0.0, 0)
    };

    Ok(PoissonSolveReport {
        nu: root.nu,
        delta_nu,
        slope_ratio,
        bracket: root.bracket,
        iterations: root.iterations,
        pair_labels: (fit_square.label.clone(), fit_rect.label.clone()),
        coefficient_source: source,
        n_samples: spec.n_samples,
        seed: spec.seed,
        failed_draws,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::f_square_vlassak_nix;
    use crate::model::f_strip;

    fn pair() -> (MembraneGeometry, MembraneGeometry) {
        let sq = MembraneGeometry::new(0.5e-3, 0.5e-3, 100e-9).unwrap();
        let rect = MembraneGeometry::new(0.5e-3, 6e-3, 100e-9).unwrap();
        (sq, rect)
    }

    #[test]
    fn residual_zero_at_closed_form_ratio() {
        let (sq, rect) = pair();
        let ratio = 8.0 / (6.0 * 1.25) * (0.8f64 + 0.062 * 0.25).powi(3);
        let r = slope_ratio_residual(0.25, ratio, 1.0, &rect, &sq, CoefficientSource::VlassakNix).unwrap();
        assert!(r.abs() < 1e-15);
    }

    #[test]
    fn equal_geometries_forced() {
        let (sq, _) = pair();
        let r = slope_ratio_residual_unchecked(0.3, 1.0, &sq, &sq, CoefficientSource::Bonnotte).unwrap();
        assert_eq!(r, 0.0);
        assert!(matches!(
            slope_ratio_residual(0.3, 1.0, 1.0, &sq, &sq, CoefficientSource::VlassakNix),
            Err(Error::ShapeTooSimilar { .. })
        ));
    }

    #[test]
    fn thickness_cancels() {
        let (sq, rect) = pair();
        let src = CoefficientSource::VlassakNix;
        let r0 = slope_ratio_residual(0.2, 0.7, 1.0, &rect, &sq, src).unwrap();
        let r1 = slope_ratio_residual(
            0.2,
            0.7,
            1.0,
            &rect.with_thickness(150e-9).unwrap(),
            &sq.with_thickness(150e-9).unwrap(),
            src,
        )
        .unwrap();
        assert_eq!(r0, r1);
    }

    #[test]
    fn bisection_finds_closed_form_root() {
        let (sq, rect) = pair();
        let target = f_strip(0.25) / f_square_vlassak_nix(0.25);
        let root = solve_geometries(target, &sq, &rect, CoefficientSource::VlassakNix).unwrap();
        assert!((root.nu - 0.25).abs() < 1e-9);
        assert!(root.bracket.0 <= root.nu && root.nu <= root.bracket.1);
    }

    #[test]
    fn out_of_range_ratio_has_no_root() {
        let (sq, rect) = pair();
        let too_low = f_strip(0.495) / f_square_vlassak_nix(0.495);
        assert!(matches!(
            solve_geometries(too_low, &sq, &rect, CoefficientSource::VlassakNix),
            Err(Error::NoRootInBracket { .. })
        ));
    }

    #[test]
    fn not_square() {
        let (_, rect) = pair();
        let sq = MembraneGeometry::new(0.5e-3, 0.52e-3, 100e-9).unwrap();
        assert!(matches!(check_pair(&rect, &sq), Err(Error::NotSquare { .. })));
    }
}
