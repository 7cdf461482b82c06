//! Recompute C1 and f with the large-deflection membrane solver and compare
//! them with the closed forms. Pass an aspect ratio to choose the shape.

use bulgekit::model::{coefficients_for, CoefficientSource};
use bulgekit::solver::{extract_coefficients, reference_membrane, SolverConfig};

fn main() -> bulgekit::Result<()> {
    let ratio: f64 = std::env::args().nth(1).map_or(Ok(1.0), |s| s.parse()).expect("aspect ratio");
    let nu = 0.3;
    let (geometry, material) = reference_membrane(ratio, nu)?;
    let fit = extract_coefficients(&geometry, &material, &SolverConfig::default())?;
    println!("{:>12} {:>12} {:>12}", "P (Pa)", "h (um)", "h/t");
    for &(p, h) in &fit.samples {
        println!("{p:>12.4e} {:>12.4} {:>12.2}", h * 1e6, h / geometry.thickness());
    }
    println!("solver: C1 = {:.4}, f = {:.4} (fit residual {:.1e})", fit.c1, fit.f, fit.relative_residual);
    if let Ok(c) = coefficients_for(ratio, nu, CoefficientSource::VlassakNix) {
        println!("closed form: C1 = {:.4}, f = {:.4} ({})", c.c1, c.f, c.source);
    }
    Ok(())
}
