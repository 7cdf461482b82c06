//! Poisson's ratio of a nitride film from a square and a rectangular
//! membrane cut from the same wafer.

use std::path::Path;

use bulgekit::fitting::fit_curve;
use bulgekit::io::{load_config, parse_curve};
use bulgekit::montecarlo::UncertaintySpec;
use bulgekit::poisson::solve_poisson;

fn main() -> bulgekit::Result<()> {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/data");
    let fit = |label: &str| -> bulgekit::Result<_> {
        let exp = load_config(&data.join(format!("{label}.json")))?;
        let curve = parse_curve(&data.join(format!("{label}.csv")))?.curve;
        fit_curve(&curve, &exp.geometry, &exp.fit_options)
    };
    let square = fit("2M")?;
    let rect = fit("5M")?;
    println!(
        "{}: b/a = {:.2}, slope {:.4e} Pa/m^3",
        square.label,
        square.geometry.aspect_ratio(),
        square.slope
    );
    println!(
        "{}: b/a = {:.2}, slope {:.4e} Pa/m^3",
        rect.label,
        rect.geometry.aspect_ratio(),
        rect.slope
    );

    let report = solve_poisson(&square, &rect, square.coefficient_source, &UncertaintySpec::new(10_000, 42))?;
    println!(
        "nu = {:.3} +- {:.3} after {} bisection steps",
        report.nu, report.delta_nu, report.iterations
    );
    for w in &report.warnings {
        println!("warning: {w}");
    }
    Ok(())
}
