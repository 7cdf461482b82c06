//! Oxide properties backed out of a nitride/oxide bilayer.

use bulgekit::io::{BILAYER_NITRIDE_NM, BILAYER_OXIDE_NM};
use bulgekit::mixture::{LayerInput, Measured, MixtureReport, PropertyMode};
use bulgekit::montecarlo::UncertaintySpec;

fn main() -> bulgekit::Result<()> {
    let spec = UncertaintySpec::new(10_000, 42);
    let cases = [
        (PropertyMode::YoungsModulus, (147e9, 14e9), (212e9, 8e9), 1e-9, "GPa"),
        (PropertyMode::ResidualStress, (107e6, 2e6), (420e6, 27e6), 1e-6, "MPa"),
        (PropertyMode::PoissonRatio, (0.23, 0.0), (0.29, 0.0), 1.0, ""),
    ];
    for (mode, composite, nitride, scale, unit) in cases {
        let layers = vec![
            LayerInput {
                name: "Si3N4".into(),
                thickness: Measured::new(BILAYER_NITRIDE_NM * 1e-9, 2e-9)?,
                value: Some(Measured::new(nitride.0, nitride.1)?),
            },
            LayerInput {
                name: "SiO2".into(),
                thickness: Measured::new(BILAYER_OXIDE_NM * 1e-9, 2e-9)?,
                value: None,
            },
        ];
        let report = MixtureReport::run(mode, Measured::new(composite.0, composite.1)?, layers, &spec)?;
        println!(
            "{mode}: {:.3} +- {:.3} {unit}",
            report.result.value * scale,
            report.result.uncertainty * scale
        );
        if let Some(note) = report.note {
            println!("  note: {note}");
        }
    }
    Ok(())
}
