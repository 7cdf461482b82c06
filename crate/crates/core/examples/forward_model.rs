//! Pressure needed for a range of centre deflections of a square nitride
//! membrane, and the deflection reached at 1 bar.

use bulgekit::model::{CoefficientSource, LoadDeflectionLaw, MaterialParams, MembraneGeometry};

fn main() -> bulgekit::Result<()> {
    let geometry = MembraneGeometry::from_full_dimensions(3.104e-3, 3.104e-3, 104e-9)?;
    let material = MaterialParams::new(210e9, 0.3, 439e6)?;
    let law = LoadDeflectionLaw::new(&geometry, &material, CoefficientSource::VlassakNix, false)?;

    println!("{:>10} {:>12}", "h (um)", "P (mbar)");
    for h_um in [1.0, 5.0, 10.0, 25.0, 50.0, 100.0, 200.0] {
        println!("{h_um:>10.1} {:>12.3}", law.pressure(h_um * 1e-6) / 100.0);
    }
    println!("h at 1 bar: {:.2} um", law.deflection(1e5)? * 1e6);

    let with_bending = LoadDeflectionLaw::new(&geometry, &material, CoefficientSource::VlassakNix, true)?;
    println!(
        "bending adds {:.2e} of the pressure at h = 1 um",
        with_bending.pressure(1e-6) / law.pressure(1e-6) - 1.0
    );
    Ok(())
}
