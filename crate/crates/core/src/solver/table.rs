use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{extract_coefficients, reference_membrane, SolverConfig};
use crate::error::{Error, Result};

/// One solver-derived `(C₁, f)` pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TableEntry {
    pub aspect_ratio: f64,
    pub nu: f64,
    pub c1: f64,
    pub f: f64,
}

/// `(C₁, f)` over a full `aspect_ratio × nu` grid, sorted by
/// `(aspect_ratio, nu)`.
///
/// CSV form: an optional `# provenance: ...` comment followed by the
/// header `aspect_ratio,nu,c1,f`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTable {
    entries: Vec<TableEntry>,
    ratios: Vec<f64>,
    nus: Vec<f64>,
    pub provenance: String,
}

const C1_BOUNDS: (f64, f64) = (1.5, 4.0);
const F_BOUNDS: (f64, f64) = (0.5, 2.5);

impl CoefficientTable {
    pub fn new(mut entries: Vec<TableEntry>, provenance: impl Into<String>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::invalid("coefficient table is empty"));
        }
        entries.sort_by(|p, q| {
            p.aspect_ratio
                .total_cmp(&q.aspect_ratio)
                .then(p.nu.total_cmp(&q.nu))
        });
        for e in &entries {
            if !(e.c1 >= C1_BOUNDS.0 && e.c1 <= C1_BOUNDS.1) || !(e.f >= F_BOUNDS.0 && e.f <= F_BOUNDS.1) {
                return Err(Error::invalid(format!(
                    "table entry at b/a = {}, nu = {} outside sanity bounds: c1 = {}, f = {}",
                    e.aspect_ratio, e.nu, e.c1, e.f
                )));
            }
            if e.aspect_ratio < 1.0 {
                return Err(Error::invalid("table aspect ratios must be >= 1"));
            }
        }
        let mut ratios: Vec<f64> = entries.iter().map(|e| e.aspect_ratio).collect();
        ratios.dedup();
        let mut nus: Vec<f64> = entries.iter().map(|e| e.nu).collect();
        nus.sort_by(f64::total_cmp);
        nus.dedup();
        if ratios.len() * nus.len() != entries.len() {
            return Err(Error::invalid("coefficient table must cover a full aspect_ratio x nu grid"));
        }
        for (k, e) in entries.iter().enumerate() {
            if e.aspect_ratio != ratios[k / nus.len()] || e.nu != nus[k % nus.len()] {
                return Err(Error::invalid("coefficient table must cover a full aspect_ratio x nu grid"));
            }
        }
        Ok(CoefficientTable {
            entries,
            ratios,
            nus,
            provenance: provenance.into(),
        })
    }

    pub fn entries(&self) -> &[TableEntry] {
        &self.entries
    }

    pub fn aspect_ratios(&self) -> &[f64] {
        &self.ratios
    }

    pub fn nus(&self) -> &[f64] {
        &self.nus
    }

    fn at(&self, ri: usize, ni: usize) -> &TableEntry {
        &self.entries[ri * self.nus.len() + ni]
    }

    /// Bilinear `(C₁, f)`. Aspect ratios outside the table are clamped to
    /// its ends (the curves plateau); `nu` is extrapolated linearly.
    pub fn interpolate(&self, aspect_ratio: f64, nu: f64) -> (f64, f64) {
        let (r0, r1, wr) = bracket(&self.ratios, aspect_ratio, false);
        let (n0, n1, wn) = bracket(&self.nus, nu, true);
        let mix = |g: fn(&TableEntry) -> f64| {
            let lo = g(self.at(r0, n0)) * (1.0 - wn) + g(self.at(r0, n1)) * wn;
            let hi = g(self.at(r1, n0)) * (1.0 - wn) + g(self.at(r1, n1)) * wn;
            lo * (1.0 - wr) + hi * wr
        };
        (mix(|e| e.c1), mix(|e| e.f))
    }

    pub fn from_csv_str(text: &str) -> Result<Self> {
        let provenance = text
            .lines()
            .find_map(|l| l.trim().strip_prefix("# provenance:"))
            .map(|s| s.trim().to_string())
            .unwrap_or_default();
        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let mut entries = Vec::new();
        for (k, row) in reader.deserialize::<TableEntry>().enumerate() {
            let entry = row.map_err(|e| Error::Parse {
                line: e.position().map(|p| p.line() as usize).unwrap_or(k + 2),
                message: e.to_string(),
            })?;
            entries.push(entry);
        }
        Self::new(entries, provenance)
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_csv_str(&text)
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = String::new();
        if !self.provenance.is_empty() {
            out.push_str(&format!("# provenance: {}\n", self.provenance));
        }
        let mut writer = csv::Writer::from_writer(Vec::new());
        for e in &self.entries {
            writer.serialize(e).expect("in-memory CSV write");
        }
        let body = writer.into_inner().expect("in-memory CSV flush");
        out.push_str(std::str::from_utf8(&body).expect("CSV is UTF-8"));
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv_string()).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
    }
}

/// Lower index, upper index and weight of `x` within sorted `knots`.
fn bracket(knots: &[f64], x: f64, extrapolate: bool) -> (usize, usize, f64) {
    let n = knots.len();
    if n == 1 {
        return (0, 0, 0.0);
    }
    let hi = knots.partition_point(|&k| k <= x).clamp(1, n - 1);
    let lo = hi - 1;
    let w = (x - knots[lo]) / (knots[hi] - knots[lo]);
    let w = if extrapolate { w } else { w.clamp(0.0, 1.0) };
    (lo, hi, w)
}

/// Run the solver at every `(aspect_ratio, nu)` of the cross product on the
/// reference membrane and collect the coefficients. Fails, listing every
/// failed entry, if any solve fails.
pub fn build_coefficient_table(aspect_ratios: &[f64], nus: &[f64], config: &SolverConfig) -> Result<CoefficientTable> {
    if aspect_ratios.is_empty() || nus.is_empty() {
        return Err(Error::invalid("aspect ratio and nu lists must be nonempty"));
    }
    let sorted = |v: &[f64]| v.windows(2).all(|w| w[1] > w[0]);
    if !sorted(aspect_ratios) || !sorted(nus) {
        return Err(Error::invalid("aspect ratio and nu lists must be strictly increasing"));
    }
    config.validate()?;
    let mut entries = Vec::new();
    let mut failures = Vec::new();
    for &r in aspect_ratios {
        for &nu in nus {
            let attempt = reference_membrane(r, nu).and_then(|(g, m)| extract_coefficients(&g, &m, config));
            match attempt {
                Ok(fit) => {
                    log::info!("b/a = {r}, nu = {nu}: c1 = {:.5}, f = {:.5}", fit.c1, fit.f);
                    entries.push(TableEntry {
                        aspect_ratio: r,
                        nu,
                        c1: fit.c1,
                        f: fit.f,
                    })
                }
                Err(e) => failures.push(format!("(b/a = {r}, nu = {nu}): {e}")),
            }
        }
    }
    if !failures.is_empty() {
        return Err(Error::invalid(format!(
            "{} table entries failed: {}",
            failures.len(),
            failures.join("; ")
        )));
    }
    let provenance = format!(
        "bulgekit {} solver, grid {}x{}, tol {:e}, config {}",
        env!("CARGO_PKG_VERSION"),
        config.grid_nx,
        config.grid_ny,
        config.gradient_tolerance,
        config.digest()
    );
    CoefficientTable::new(entries, provenance)
}
