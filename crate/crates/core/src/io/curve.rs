//! `pressure,deflection` CSV files.
//!
//! ```text
//! pressure,deflection
//! #units: mbar,um
//! 10,12.5
//! 20,17.9
//! ```
//!
//! Without a units row values are in Pa and m. Other lines starting with
//! `#` and blank lines are ignored.

use std::path::Path;

use crate::error::{Error, Result};
use crate::model::PressureDeflectionCurve;

use super::units::{length_factor, pressure_factor};
use super::{read_text, write_text};

/// A parsed curve and any non-fatal remarks made while reading it.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedCurve {
    pub curve: PressureDeflectionCurve,
    pub warnings: Vec<String>,
}

const HEADER: [&str; 2] = ["pressure", "deflection"];

fn parse_error(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

pub fn parse_curve_str(text: &str, label: &str) -> Result<ParsedCurve> {
    let mut header_seen = false;
    let mut scale = (1.0, 1.0);
    let mut rows: Vec<(f64, f64, usize)> = Vec::new();

    for (k, raw) in text.lines().enumerate() {
        let line_no = k + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(units) = line.strip_prefix("#units:") {
            if !rows.is_empty() {
                return Err(parse_error(line_no, "units row must precede the data"));
            }
            let parts: Vec<&str> = units.split(',').map(str::trim).collect();
            if parts.len() != 2 {
                return Err(parse_error(line_no, "units row needs exactly two entries"));
            }
            scale = (pressure_factor(parts[0])?, length_factor(parts[1])?);
            continue;
        }
        if line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if !header_seen {
            if fields.len() != 2 || !fields.iter().zip(HEADER).all(|(f, h)| f.eq_ignore_ascii_case(h)) {
                return Err(parse_error(line_no, "expected header 'pressure,deflection'"));
            }
            header_seen = true;
            continue;
        }
        if fields.len() != 2 {
            return Err(parse_error(line_no, format!("expected 2 fields, found {}", fields.len())));
        }
        let number = |s: &str, what: &str| -> Result<f64> {
            let v: f64 = s
                .parse()
                .map_err(|_| parse_error(line_no, format!("{what} '{s}' is not a number")))?;
            if !v.is_finite() {
                return Err(parse_error(line_no, format!("{what} '{s}' is not finite")));
            }
            if v < 0.0 {
                return Err(parse_error(line_no, format!("{what} {s} is negative")));
            }
            Ok(v)
        };
        let p = number(fields[0], "pressure")? * scale.0;
        let h = number(fields[1], "deflection")? * scale.1;
        rows.push((p, h, line_no));
    }
    if !header_seen {
        return Err(parse_error(1, "missing header 'pressure,deflection'"));
    }

    let mut warnings = Vec::new();
    if rows.windows(2).any(|w| w[1].0 < w[0].0) {
        warnings.push(format!("{label}: samples were not in pressure order and have been sorted"));
        rows.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.2.cmp(&y.2)));
    }
    if let Some(w) = rows.windows(2).find(|w| w[1].0 == w[0].0) {
        return Err(Error::Monotonicity {
            line: w[1].2,
            pressure: w[1].0,
        });
    }
    let curve = PressureDeflectionCurve::new(rows.into_iter().map(|(p, h, _)| (p, h)).collect(), label)?;
    Ok(ParsedCurve { curve, warnings })
}

/// Read a curve file; the label is the file stem.
pub fn parse_curve(path: &Path) -> Result<ParsedCurve> {
    let text = read_text(path)?;
    let label = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    parse_curve_str(&text, &label)
}

/// SI values in shortest round-trip form.
pub fn curve_to_string(curve: &PressureDeflectionCurve) -> String {
    let mut out = String::from("pressure,deflection\n#units: Pa,m\n");
    for &(p, h) in curve.samples() {
        out.push_str(&format!("{p:e},{h:e}\n"));
    }
    out
}

pub fn write_curve(curve: &PressureDeflectionCurve, path: &Path) -> Result<()> {
    write_text(path, &curve_to_string(curve))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_file() {
        let c = parse_curve_str("pressure,deflection\n1000,1e-6\n", "x").unwrap();
        assert_eq!(c.curve.samples(), &[(1000.0, 1e-6)]);
        assert!(c.warnings.is_empty());
    }

    #[test]
    fn unit_row_scales() {
        let c = parse_curve_str("pressure,deflection\n#units: mbar,um\n10,2\n", "x").unwrap();
        assert_eq!(c.curve.samples(), &[(1000.0, 2e-6)]);
    }

    #[test]
    fn negative_is_parse_error() {
        match parse_curve_str("pressure,deflection\n1,1e-6\n2,-1e-6\n", "x") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_unit() {
        assert!(matches!(
            parse_curve_str("pressure,deflection\n#units: psi,um\n", "x"),
            Err(Error::Unit(_))
        ));
    }

    #[test]
    fn resorts_and_rejects_duplicates() {
        let c = parse_curve_str("pressure,deflection\n2,2e-6\n1,1e-6\n3,3e-6\n", "x").unwrap();
        assert_eq!(c.curve.samples()[0], (1.0, 1e-6));
        assert_eq!(c.warnings.len(), 1);
        assert!(matches!(
            parse_curve_str("pressure,deflection\n1,1e-6\n2,2e-6\n2,3e-6\n", "x"),
            Err(Error::Monotonicity { line: 4, .. })
        ));
    }

    #[test]
    fn round_trip_is_lossless() {
        let curve = PressureDeflectionCurve::new(vec![(0.1 + 0.2, 1.0 / 3.0 * 1e-6), (1234.5678901234567, 9.87654321e-5)], "r").unwrap();
        let back = parse_curve_str(&curve_to_string(&curve), "r").unwrap();
        assert_eq!(back.curve, curve);
    }
}
