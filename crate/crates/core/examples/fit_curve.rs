//! Fit a measured load-deflection curve and estimate the uncertainty that
//! comes from the membrane dimensions.

use std::path::Path;

use bulgekit::fitting::{fit_curve_with_uncertainty, linearize};
use bulgekit::io::{load_config, parse_curve};

fn main() -> bulgekit::Result<()> {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/data");
    let exp = load_config(&data.join("1M.json"))?;
    let parsed = parse_curve(&data.join("1M.csv"))?;

    let min_h = exp.fit_options.min_deflection_for(&exp.geometry);
    for p in linearize(&parsed.curve, min_h)?.iter().take(3) {
        println!("h^2 = {:.4e} m^2, P/h = {:.4e} Pa/m", p.x, p.y);
    }

    let fit = fit_curve_with_uncertainty(&parsed.curve, &exp.geometry, &exp.fit_options, &exp.uncertainty)?;
    println!(
        "sigma0 = {:.1} +- {:.1} MPa",
        fit.sigma0 * 1e-6,
        fit.u_sigma0 * 1e-6
    );
    println!(
        "E = {:.1} +- {:.1} GPa at nu = {} (r^2 = {:.5}, {} points)",
        fit.youngs_modulus * 1e-9,
        fit.u_youngs_modulus * 1e-9,
        fit.nu_assumed,
        fit.r_squared,
        fit.points_used
    );
    Ok(())
}
