//! Build a small coefficient table on a coarse grid and interpolate it.

use bulgekit::solver::{build_coefficient_table, SolverConfig};

fn main() -> bulgekit::Result<()> {
    let config = SolverConfig::default().with_grid(33);
    let table = build_coefficient_table(&[1.0, 1.5, 2.0, 3.0], &[0.2, 0.3], &config)?;
    print!("{}", table.to_csv_string());
    for (ratio, nu) in [(1.25, 0.25), (2.5, 0.3)] {
        let (c1, f) = table.interpolate(ratio, nu);
        println!("b/a = {ratio}, nu = {nu}: C1 = {c1:.4}, f = {f:.4}");
    }
    Ok(())
}
