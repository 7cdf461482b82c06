//! Unit names accepted in files and on the command line.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    Pressure,
    Length,
}

/// Factor converting `unit` to Pa.
pub fn pressure_factor(unit: &str) -> Result<f64> {
    Ok(match unit.trim() {
        "Pa" | "pa" => 1.0,
        "kPa" | "kpa" => 1e3,
        "mbar" => 1e2,
        "bar" => 1e5,
        "MPa" => 1e6,
        "GPa" => 1e9,
        other => return Err(Error::Unit(other.to_string())),
    })
}

/// Factor converting `unit` to m.
pub fn length_factor(unit: &str) -> Result<f64> {
    Ok(match unit.trim() {
        "m" => 1.0,
        "mm" => 1e-3,
        "um" | "µm" | "μm" => 1e-6,
        "nm" => 1e-9,
        other => return Err(Error::Unit(other.to_string())),
    })
}

pub fn factor(quantity: Quantity, unit: &str) -> Result<f64> {
    match quantity {
        Quantity::Pressure => pressure_factor(unit),
        Quantity::Length => length_factor(unit),
    }
}

/// Parse `"420MPa"`, `"90 nm"` or a bare SI number.
pub fn parse_quantity(text: &str, quantity: Quantity) -> Result<f64> {
    let text = text.trim();
    let split = (1..=text.len())
        .rev()
        .filter(|&i| text.is_char_boundary(i))
        .find(|&i| text[..i].trim_end().parse::<f64>().is_ok())
        .ok_or_else(|| Error::invalid(format!("'{text}' is not a number")))?;
    let value: f64 = text[..split].trim_end().parse().unwrap_or(f64::NAN);
    if !value.is_finite() {
        return Err(Error::invalid(format!("'{text}' is not a finite number")));
    }
    let unit = text[split..].trim();
    if unit.is_empty() {
        return Ok(value);
    }
    Ok(value * factor(quantity, unit)?)
}

/// Parse a dimensionless number.
pub fn parse_number(text: &str) -> Result<f64> {
    let value: f64 = text
        .trim()
        .parse()
        .map_err(|_| Error::invalid(format!("'{}' is not a number", text.trim())))?;
    if !value.is_finite() {
        return Err(Error::invalid(format!("'{}' is not a finite number", text.trim())));
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conversions() {
        assert_eq!(parse_quantity("1000", Quantity::Pressure).unwrap(), 1000.0);
        assert_eq!(parse_quantity("5mbar", Quantity::Pressure).unwrap(), 500.0);
        assert_eq!(parse_quantity("1 bar", Quantity::Pressure).unwrap(), 1e5);
        assert_eq!(parse_quantity("2.5um", Quantity::Length).unwrap(), 2.5 * 1e-6);
        assert_eq!(parse_quantity("1e-6", Quantity::Length).unwrap(), 1e-6);
        assert_eq!(parse_quantity("90nm", Quantity::Length).unwrap(), 90.0 * 1e-9);
    }

    #[test]
    fn rejects_unknown_units() {
        assert!(matches!(parse_quantity("3 psi", Quantity::Pressure), Err(Error::Unit(_))));
        assert!(matches!(parse_quantity("3 mm", Quantity::Pressure), Err(Error::Unit(_))));
        assert!(parse_quantity("nan", Quantity::Length).is_err());
        assert!(parse_quantity("mm", Quantity::Length).is_err());
    }
}
