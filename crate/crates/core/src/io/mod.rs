//! Files in and out: curves, experiment configurations, reports and the
//! bundled reference membranes.

mod config;
mod curve;
mod dataset;
mod report;
mod units;

pub use config::{
    load_config, AnalysisBlock, DimensionUncertainties, Experiment, ExperimentConfig, GeometryBlock, LengthUnits,
    MaterialBlock, StressUnits, UncertaintyBlock, DEFAULT_LATERAL_UNCERTAINTY,
};
pub use curve::{curve_to_string, parse_curve, parse_curve_str, write_curve, ParsedCurve};
pub use dataset::{
    bundled_membrane, load_bundled_geometry, BundledMembrane, ReportedPair, BILAYER_NITRIDE_NM, BILAYER_OXIDE_NM,
    BILAYER_THICKNESS_NM, BUNDLED_MEMBRANES, MONOLAYER_THICKNESS_NM, REPORTED_PAIRS,
};
pub use report::{read_report, write_report, Provenance, Report, ReportEntry, ReportFormat};
pub use units::{length_factor, parse_number, parse_quantity, pressure_factor, Quantity};

use std::path::Path;

use crate::error::{Error, Result};

pub(crate) fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub(crate) fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}
