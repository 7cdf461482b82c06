//! Shape coefficients `C₁(b/a)`, `f(ν, b/a)` and `α(b/a)` of the
//! load-deflection law
//!
//! ```text
//! P = C₁·(t·σ₀/a²)·h + E/(12·α·(1−ν²))·(t³/a⁴)·h + f·(t/a⁴)·E/(1−ν)·h³
//! ```
//!
//! Closed forms from the bulge-test literature are available for square
//! membranes, for `b/a = 2` and for the infinite strip. Everything in between
//! is served from a table produced by the membrane solver in this crate.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::material::check_poisson_ratio;
use crate::error::{Error, Result};
use crate::solver::CoefficientTable;

/// Ratios this close to a tabulated literature ratio use its closed form.
pub const RATIO_MATCH_TOLERANCE: f64 = 1e-9;

/// Beyond this aspect ratio a rectangle behaves as an infinite strip.
pub const STRIP_ASPECT_RATIO: f64 = 4.0;

/// Environment variable that redirects the bundled coefficient table.
pub const DATA_DIR_ENV: &str = "BULGEKIT_DATA_DIR";

/// File name of the coefficient table inside the data directory.
pub const TABLE_FILE_NAME: &str = "coefficients.csv";

const BUNDLED_TABLE: &str = include_str!("../../data/coefficients.csv");

/// Where a coefficient triple comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum CoefficientSource {
    /// Vlassak & Nix: square and infinite-strip closed forms.
    #[default]
    VlassakNix,
    /// Bonnotte et al.: square and `b/a = 2`.
    Bonnotte,
    /// Maier-Schneider et al.: square only.
    MaierSchneider,
    /// Interpolated from the membrane-solver table.
    SolverDerived,
}

impl CoefficientSource {
    pub const ALL: [CoefficientSource; 4] = [
        CoefficientSource::VlassakNix,
        CoefficientSource::Bonnotte,
        CoefficientSource::MaierSchneider,
        CoefficientSource::SolverDerived,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CoefficientSource::VlassakNix => "vlassak-nix",
            CoefficientSource::Bonnotte => "bonnotte",
            CoefficientSource::MaierSchneider => "maier-schneider",
            CoefficientSource::SolverDerived => "solver-derived",
        }
    }
}

impl fmt::Display for CoefficientSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CoefficientSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .map(|c| c.to_ascii_lowercase())
            .collect();
        match key.as_str() {
            "vlassaknix" | "vn" => Ok(CoefficientSource::VlassakNix),
            "bonnotte" => Ok(CoefficientSource::Bonnotte),
            "maierschneider" | "ms" => Ok(CoefficientSource::MaierSchneider),
            "solverderived" | "solver" | "fd" => Ok(CoefficientSource::SolverDerived),
            _ => Err(Error::invalid(format!("unknown coefficient source '{s}'"))),
        }
    }
}

/// The triple `(C₁, f, α)` at one aspect ratio and Poisson's ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShapeCoefficients {
    pub c1: f64,
    pub f: f64,
    pub alpha: f64,
    pub source: CoefficientSource,
    pub aspect_ratio: f64,
    pub nu: f64,
}

/// Square-membrane f from Vlassak & Nix: `(0.8 + 0.062ν)⁻³`.
pub fn f_square_vlassak_nix(nu: f64) -> f64 {
    (0.8 + 0.062 * nu).powi(-3)
}

/// Plane-strain strip: `8 / [6(1 + ν)]`.
pub fn f_strip(nu: f64) -> f64 {
    8.0 / (6.0 * (1.0 + nu))
}

/// Bending coefficient α, piecewise linear through the literature values
/// at `b/a` = 1, 2 and the strip limit.
pub fn alpha_for(aspect_ratio: f64) -> f64 {
    const KNOTS: [(f64, f64); 3] = [(1.0, 1.26e-3), (2.0, 2.54e-3), (STRIP_ASPECT_RATIO, 2.6e-3)];
    if aspect_ratio <= KNOTS[0].0 {
        return KNOTS[0].1;
    }
    for w in KNOTS.windows(2) {
        let ((r0, a0), (r1, a1)) = (w[0], w[1]);
        if aspect_ratio <= r1 {
            return a0 + (a1 - a0) * (aspect_ratio - r0) / (r1 - r0);
        }
    }
    KNOTS[2].1
}

fn near(x: f64, target: f64) -> bool {
    (x - target).abs() <= RATIO_MATCH_TOLERANCE
}

/// The table shipped with the crate, or the one found in
/// `$BULGEKIT_DATA_DIR/coefficients.csv` when that variable is set.
pub fn default_table() -> &'static CoefficientTable {
    static TABLE: OnceLock<CoefficientTable> = OnceLock::new();
    TABLE.get_or_init(|| {
        if let Some(dir) = std::env::var_os(DATA_DIR_ENV) {
            let path = std::path::Path::new(&dir).join(TABLE_FILE_NAME);
            match CoefficientTable::read_csv(&path) {
                Ok(t) => return t,
                Err(e) => log::warn!("ignoring {}: {e}; using bundled table", path.display()),
            }
        }
        CoefficientTable::from_csv_str(BUNDLED_TABLE).expect("bundled coefficient table is valid")
    })
}

/// Coefficients for `aspect_ratio = b/a` and Poisson's ratio `nu`, using the
/// bundled solver table for ratios no closed form covers.
pub fn coefficients_for(aspect_ratio: f64, nu: f64, source: CoefficientSource) -> Result<ShapeCoefficients> {
    coefficients_with_table(aspect_ratio, nu, source, Some(default_table()))
}

/// As [`coefficients_for`] with an explicit (or no) interpolation table.
pub fn coefficients_with_table(
    aspect_ratio: f64,
    nu: f64,
    source: CoefficientSource,
    table: Option<&CoefficientTable>,
) -> Result<ShapeCoefficients> {
    if !(aspect_ratio.is_finite() && aspect_ratio >= 1.0 - RATIO_MATCH_TOLERANCE) {
        return Err(Error::invalid(format!("aspect ratio must be >= 1, got {aspect_ratio}")));
    }
    check_poisson_ratio(nu)?;
    let alpha = alpha_for(aspect_ratio);
    let closed = |c1: f64, f: f64| ShapeCoefficients {
        c1,
        f,
        alpha,
        source,
        aspect_ratio,
        nu,
    };
    let unsupported = Error::UnsupportedRatio {
        ratio: aspect_ratio,
        coefficient_source: source,
    };

    match source {
        CoefficientSource::VlassakNix => {
            if near(aspect_ratio, 1.0) {
                Ok(closed(3.39, f_square_vlassak_nix(nu)))
            } else if aspect_ratio >= STRIP_ASPECT_RATIO {
                Ok(closed(2.0, f_strip(nu)))
            } else {
                let table = table.ok_or(unsupported)?;
                Ok(from_table(table, aspect_ratio, nu, alpha))
            }
        }
        CoefficientSource::MaierSchneider => {
            if near(aspect_ratio, 1.0) {
                Ok(closed(3.45, 1.994 * (1.0 - 0.271 * nu)))
            } else {
                Err(unsupported)
            }
        }
        CoefficientSource::Bonnotte => {
            if near(aspect_ratio, 1.0) {
                Ok(closed(3.42, 1.91 * (1.0 - 0.207 * nu)))
            } else if near(aspect_ratio, 2.0) {
                Ok(closed(2.19, 1.08 * (1.0 - 0.181 * nu)))
            } else {
                Err(unsupported)
            }
        }
        CoefficientSource::SolverDerived => {
            let table = table.ok_or(unsupported)?;
            Ok(from_table(table, aspect_ratio, nu, alpha))
        }
    }
}

fn from_table(table: &CoefficientTable, aspect_ratio: f64, nu: f64, alpha: f64) -> ShapeCoefficients {
    let (c1, f) = table.interpolate(aspect_ratio, nu);
    ShapeCoefficients {
        c1,
        f,
        alpha,
        source: CoefficientSource::SolverDerived,
        aspect_ratio,
        nu,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn vlassak_nix_square() {
        let c = coefficients_for(1.0, 0.3, CoefficientSource::VlassakNix).unwrap();
        assert_eq!(c.c1, 3.39);
        assert_relative_eq!(c.f, 1.823, max_relative = 5e-4);
        assert_eq!(c.alpha, 1.26e-3);
    }

    #[test]
    fn maier_schneider_square() {
        let c = coefficients_for(1.0, 0.3, CoefficientSource::MaierSchneider).unwrap();
        assert_eq!(c.c1, 3.45);
        assert_relative_eq!(c.f, 1.832, max_relative = 5e-4);
    }

    #[test]
    fn strip_limit() {
        let c = coefficients_for(12.0, 0.3, CoefficientSource::VlassakNix).unwrap();
        assert_eq!(c.c1, 2.0);
        assert_relative_eq!(c.f, 1.0256, max_relative = 1e-4);
        assert_eq!(c.alpha, 2.6e-3);
    }

    #[test]
    fn bonnotte_ratio_two() {
        let c = coefficients_for(2.0, 0.3, CoefficientSource::Bonnotte).unwrap();
        assert_eq!(c.c1, 2.19);
        assert_relative_eq!(c.f, 1.0214, max_relative = 1e-4);
    }

    #[test]
    fn literature_sources_reject_other_ratios() {
        assert!(matches!(
            coefficients_for(1.9, 0.3, CoefficientSource::Bonnotte),
            Err(Error::UnsupportedRatio { .. })
        ));
        assert!(matches!(
            coefficients_for(2.0, 0.3, CoefficientSource::MaierSchneider),
            Err(Error::UnsupportedRatio { .. })
        ));
        assert!(matches!(
            coefficients_with_table(2.0, 0.3, CoefficientSource::VlassakNix, None),
            Err(Error::UnsupportedRatio { .. })
        ));
    }

    #[test]
    fn intermediate_ratio_comes_from_table() {
        let c = coefficients_for(1.9, 0.3, CoefficientSource::VlassakNix).unwrap();
        assert_eq!(c.source, CoefficientSource::SolverDerived);
        assert!(c.c1 > 2.0 && c.c1 < 3.39, "{c:?}");
        assert!(c.f > 0.9 && c.f < 1.83, "{c:?}");
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(coefficients_for(0.5, 0.3, CoefficientSource::VlassakNix).is_err());
        assert!(coefficients_for(1.0, 0.5, CoefficientSource::VlassakNix).is_err());
    }

    #[test]
    fn source_names_parse() {
        for s in CoefficientSource::ALL {
            assert_eq!(s.name().parse::<CoefficientSource>().unwrap(), s);
        }
        assert_eq!("VlassakNix".parse::<CoefficientSource>().unwrap(), CoefficientSource::VlassakNix);
        assert!("nope".parse::<CoefficientSource>().is_err());
    }

    #[test]
    fn closed_forms_match_direct_evaluation_on_grid() {
        for k in 0..=1000 {
            let nu = -0.5 + 1e-3 * k as f64;
            if !(nu > -0.5 && nu < 0.5) {
                continue;
            }
            let sq = coefficients_for(1.0, nu, CoefficientSource::VlassakNix).unwrap();
            assert_eq!(sq.f.to_bits(), (0.8 + 0.062 * nu).powi(-3).to_bits());
            let strip = coefficients_for(7.0, nu, CoefficientSource::VlassakNix).unwrap();
            assert_eq!(strip.f.to_bits(), (8.0 / (6.0 * (1.0 + nu))).to_bits());
        }
    }

    #[test]
    fn alpha_interpolates() {
        assert_eq!(alpha_for(1.0), 1.26e-3);
        assert_eq!(alpha_for(2.0), 2.54e-3);
        assert_eq!(alpha_for(100.0), 2.6e-3);
        let mid = alpha_for(1.5);
        assert!(mid > 1.26e-3 && mid < 2.54e-3);
    }
}
