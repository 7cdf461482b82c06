//! Reference membranes: ten LPCVD Si₃N₄ monolayers (`1M`–`5M`, 104 nm)
//! and Si₃N₄/SiO₂ bilayers (`1B`–`5B`, 90 nm + 98 nm), with the residual
//! stress and Young's modulus reported for each at ν = 0.3.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::MembraneGeometry;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BundledMembrane {
    pub label: &'static str,
    pub width_2a_mm: f64,
    pub length_2b_mm: f64,
    /// As tabulated (rounded).
    pub aspect_ratio: f64,
    pub thickness_nm: f64,
    /// (value, uncertainty) in MPa
    pub sigma0_mpa: (f64, f64),
    /// (value, uncertainty) in GPa
    pub youngs_modulus_gpa: (f64, f64),
}

impl BundledMembrane {
    /// Geometry in SI, without uncertainties.
    pub fn geometry(&self) -> MembraneGeometry {
        MembraneGeometry::from_full_dimensions(
            self.width_2a_mm * 1e-3,
            self.length_2b_mm * 1e-3,
            self.thickness_nm * 1e-9,
        )
        .expect("bundled dimensions are positive")
    }
}

const fn m(
    label: &'static str,
    width_2a_mm: f64,
    length_2b_mm: f64,
    aspect_ratio: f64,
    thickness_nm: f64,
    sigma0_mpa: (f64, f64),
    youngs_modulus_gpa: (f64, f64),
) -> BundledMembrane {
    BundledMembrane {
        label,
        width_2a_mm,
        length_2b_mm,
        aspect_ratio,
        thickness_nm,
        sigma0_mpa,
        youngs_modulus_gpa,
    }
}

pub const MONOLAYER_THICKNESS_NM: f64 = 104.0;
pub const BILAYER_THICKNESS_NM: f64 = 188.0;
pub const BILAYER_NITRIDE_NM: f64 = 90.0;
pub const BILAYER_OXIDE_NM: f64 = 98.0;

pub const BUNDLED_MEMBRANES: [BundledMembrane; 10] = [
    m("1M", 3.104, 3.104, 1.0, 104.0, (439.0, 27.0), (210.0, 16.0)),
    m("2M", 2.131, 2.131, 1.0, 104.0, (400.0, 27.0), (217.0, 19.0)),
    m("3M", 2.131, 2.131, 1.0, 104.0, (409.0, 25.0), (214.0, 16.0)),
    m("4M", 2.14, 2.14, 1.0, 104.0, (429.0, 29.0), (211.0, 18.0)),
    m("5M", 1.138, 2.131, 1.9, 104.0, (414.0, 34.0), (219.0, 26.0)),
    m("1B", 1.89, 1.89, 1.0, 188.0, (104.0, 8.0), (150.0, 14.0)),
    m("2B", 0.662, 0.662, 1.0, 188.0, (113.0, 9.0), (153.0, 17.0)),
    m("3B", 0.750, 0.750, 1.0, 188.0, (100.0, 8.0), (156.0, 17.0)),
    m("4B", 1.39, 7.80, 5.6, 188.0, (103.0, 8.0), (139.0, 15.0)),
    m("5B", 0.27, 3.28, 12.1, 188.0, (115.0, 10.0), (145.0, 16.0)),
];

/// Reported Poisson's ratio of a (rectangular, square) pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReportedPair {
    pub rect: &'static str,
    pub square: &'static str,
    pub nu: f64,
    pub delta_nu: f64,
}

const fn p(rect: &'static str, square: &'static str, nu: f64, delta_nu: f64) -> ReportedPair {
    ReportedPair {
        rect,
        square,
        nu,
        delta_nu,
    }
}

pub const REPORTED_PAIRS: [ReportedPair; 10] = [
    p("5M", "1M", 0.22, 0.05),
    p("5M", "2M", 0.29, 0.07),
    p("5M", "3M", 0.27, 0.06),
    p("5M", "4M", 0.24, 0.05),
    p("4B", "1B", 0.33, 0.05),
    p("4B", "2B", 0.38, 0.09),
    p("4B", "3B", 0.41, 0.09),
    p("5B", "1B", 0.23, 0.05),
    p("5B", "2B", 0.29, 0.08),
    p("5B", "3B", 0.33, 0.09),
];

pub fn bundled_membrane(label: &str) -> Result<&'static BundledMembrane> {
    BUNDLED_MEMBRANES
        .iter()
        .find(|b| b.label.eq_ignore_ascii_case(label.trim()))
        .ok_or_else(|| Error::UnknownLabel(label.to_string()))
}

pub fn load_bundled_geometry(label: &str) -> Result<MembraneGeometry> {
    Ok(bundled_membrane(label)?.geometry())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lookups() {
        let g = load_bundled_geometry("1M").unwrap();
        assert_eq!(2.0 * g.half_width(), 3.104e-3);
        assert_eq!(g.thickness(), 104e-9);
        let b = bundled_membrane("4B").unwrap();
        assert_eq!((b.width_2a_mm, b.length_2b_mm, b.aspect_ratio, b.thickness_nm), (1.39, 7.80, 5.6, 188.0));
        assert!(matches!(load_bundled_geometry("9Z"), Err(Error::UnknownLabel(_))));
    }

    #[test]
    fn tabulated_ratios_match_dimensions() {
        for b in &BUNDLED_MEMBRANES {
            let r = b.geometry().aspect_ratio();
            assert!((r - b.aspect_ratio).abs() < 0.05, "{}: {r}", b.label);
        }
        assert_eq!(BILAYER_NITRIDE_NM + BILAYER_OXIDE_NM, BILAYER_THICKNESS_NM);
    }
}
