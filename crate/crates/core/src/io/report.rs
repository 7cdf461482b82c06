//! Result reports in JSON or plain text.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fitting::FitResult;
use crate::mixture::MixtureReport;
use crate::model::CoefficientSource;
use crate::poisson::PoissonSolveReport;

use super::{read_text, write_text};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Text,
}

impl ReportFormat {
    /// Text for `.txt`, JSON otherwise.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("txt") => ReportFormat::Text,
            _ => ReportFormat::Json,
        }
    }
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "json" => Ok(ReportFormat::Json),
            "text" | "txt" => Ok(ReportFormat::Text),
            _ => Err(Error::Usage(format!("unknown report format '{s}' (expected json or text)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ReportEntry {
    Fit(FitResult),
    Poisson(PoissonSolveReport),
    Mixture(MixtureReport),
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Provenance {
    pub tool_version: String,
    pub coefficient_source: Option<CoefficientSource>,
    pub seed: Option<u64>,
    pub n_samples: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub provenance: Provenance,
    #[serde(default)]
    pub assumptions: Vec<String>,
    #[serde(default)]
    pub units: BTreeMap<String, String>,
    #[serde(default)]
    pub results: Vec<ReportEntry>,
}

fn standard_units() -> BTreeMap<String, String> {
    [
        ("pressure", "Pa"),
        ("length", "m"),
        ("intercept", "Pa/m"),
        ("slope", "Pa/m^3"),
        ("stress_and_moduli", "Pa"),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v.to_string()))
    .collect()
}

impl Default for Report {
    fn default() -> Self {
        Report::new()
    }
}

impl Report {
    /// Empty report stamped with this tool's version.
    pub fn new() -> Self {
        Report {
            provenance: Provenance {
                tool_version: format!("bulgekit {}", env!("CARGO_PKG_VERSION")),
                ..Default::default()
            },
            assumptions: Vec::new(),
            units: standard_units(),
            results: Vec::new(),
        }
    }

    pub fn with_entry(mut self, entry: ReportEntry) -> Self {
        self.results.push(entry);
        self
    }

    pub fn fits(&self) -> impl Iterator<Item = &FitResult> {
        self.results.iter().filter_map(|e| match e {
            ReportEntry::Fit(f) => Some(f),
            _ => None,
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|source| Error::Json {
            context: "report".into(),
            source,
        })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let p = &self.provenance;
        let _ = writeln!(out, "# {}", p.tool_version);
        if let Some(s) = p.coefficient_source {
            let _ = writeln!(out, "coefficient_source = {s}");
        }
        if let Some(s) = p.seed {
            let _ = writeln!(out, "seed = {s}");
        }
        if let Some(n) = p.n_samples {
            let _ = writeln!(out, "n_samples = {n}");
        }
        for a in &self.assumptions {
            let _ = writeln!(out, "assumption: {a}");
        }
        for entry in &self.results {
            out.push('\n');
            match entry {
                ReportEntry::Fit(f) => fit_text(&mut out, f),
                ReportEntry::Poisson(r) => poisson_text(&mut out, r),
                ReportEntry::Mixture(m) => mixture_text(&mut out, m),
            }
        }
        out
    }

    pub fn render(&self, format: ReportFormat) -> String {
        match format {
            ReportFormat::Json => self.to_json(),
            ReportFormat::Text => self.to_text(),
        }
    }
}

fn fit_text(out: &mut String, f: &FitResult) {
    let c = &f.coefficients;
    let _ = writeln!(out, "[fit {}]", f.label);
    let _ = writeln!(out, "coefficient_source = {} (served by {})", f.coefficient_source, c.source);
    let _ = writeln!(out, "aspect_ratio = {}", f.geometry.aspect_ratio());
    let _ = writeln!(out, "c1 = {}", c.c1);
    let _ = writeln!(out, "f = {}", c.f);
    let _ = writeln!(out, "nu_assumed = {}", f.nu_assumed);
    let _ = writeln!(out, "points_used = {}", f.points_used);
    let _ = writeln!(out, "intercept_A = {:e} Pa/m", f.intercept);
    let _ = writeln!(out, "slope_B = {:e} Pa/m^3", f.slope);
    let _ = writeln!(out, "r_squared = {}", f.r_squared);
    let _ = writeln!(out, "sigma0 = {:e} Pa +- {:e} Pa", f.sigma0, f.u_sigma0);
    let _ = writeln!(out, "biaxial_modulus = {:e} Pa", f.biaxial_modulus);
    let _ = writeln!(out, "youngs_modulus = {:e} Pa +- {:e} Pa", f.youngs_modulus, f.u_youngs_modulus);
}

fn poisson_text(out: &mut String, r: &PoissonSolveReport) {
    let _ = writeln!(out, "[poisson {}/{}]", r.pair_labels.1, r.pair_labels.0);
    let _ = writeln!(out, "nu = {} +- {}", r.nu, r.delta_nu);
    let _ = writeln!(out, "slope_ratio = {}", r.slope_ratio);
    let _ = writeln!(out, "bracket = [{}, {}]", r.bracket.0, r.bracket.1);
    let _ = writeln!(out, "iterations = {}", r.iterations);
    let _ = writeln!(out, "failed_draws = {}", r.failed_draws);
    for w in &r.warnings {
        let _ = writeln!(out, "warning: {w}");
    }
}

fn mixture_text(out: &mut String, m: &MixtureReport) {
    let unit = if m.unit.is_empty() { String::new() } else { format!(" {}", m.unit) };
    let _ = writeln!(out, "[mixture {}]", m.mode);
    let _ = writeln!(out, "composite = {:e}{unit} +- {:e}{unit}", m.composite.value, m.composite.uncertainty);
    for l in &m.layers {
        match l.value {
            Some(v) => {
                let _ = writeln!(
                    out,
                    "layer {} = {:e}{unit} +- {:e}{unit} over {:e} m",
                    l.name, v.value, v.uncertainty, l.thickness.value
                );
            }
            None => {
                let _ = writeln!(out, "layer {} = unknown over {:e} m", l.name, l.thickness.value);
            }
        }
    }
    let _ = writeln!(
        out,
        "{} = {:e}{unit} +- {:e}{unit}",
        m.result.unknown_layer, m.result.value, m.result.uncertainty
    );
    if let Some(n) = &m.note {
        let _ = writeln!(out, "note: {n}");
    }
}

pub fn write_report(report: &Report, path: &Path, format: ReportFormat) -> Result<()> {
    write_text(path, &report.render(format))
}

/// Read a JSON report.
pub fn read_report(path: &Path) -> Result<Report> {
    let text = read_text(path)?;
    Report::from_json(&text).map_err(|e| match e {
        Error::Json { source, .. } => Error::Json {
            context: path.display().to_string(),
            source,
        },
        other => other,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fitting::extract_parameters;
    use crate::model::MembraneGeometry;

    fn sample_fit() -> FitResult {
        let g = MembraneGeometry::from_full_dimensions(2.131e-3, 2.131e-3, 104e-9)
            .unwrap()
            .with_uncertainties(1e-6, 1e-6, 0.0)
            .unwrap();
        let mut f = extract_parameters(4.1e8 / 3.0, 2.9e18 / 7.0, &g, 0.3, CoefficientSource::VlassakNix).unwrap();
        f.label = "2M".into();
        f
    }

    #[test]
    fn empty_report_is_valid() {
        let r = Report::new();
        let back = Report::from_json(&r.to_json()).unwrap();
        assert_eq!(back, r);
        assert!(r.to_text().starts_with("# bulgekit"));
    }

    #[test]
    fn fit_round_trips_exactly() {
        let r = Report::new().with_entry(ReportEntry::Fit(sample_fit()));
        let back = Report::from_json(&r.to_json()).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn text_echoes_assumed_nu() {
        let r = Report::new().with_entry(ReportEntry::Fit(sample_fit()));
        assert!(r.to_text().lines().any(|l| l == "nu_assumed = 0.3"));
    }

    #[test]
    fn format_from_extension() {
        assert_eq!(ReportFormat::from_path(Path::new("a.txt")), ReportFormat::Text);
        assert_eq!(ReportFormat::from_path(Path::new("a.json")), ReportFormat::Json);
    }
}
