//! Decay rate over a parameter grid and over the data scale.
//!
//! `cargo run --release --example parameter_sweep [grid.json]`

use kirchhoff_heat::runner::{sweep, ScenarioConfig, SweepGrid};
use kirchhoff_heat::Result;

fn main() -> Result<()> {
    let grid = match std::env::args().nth(1) {
        Some(path) => SweepGrid::from_json_str(&std::fs::read_to_string(path)?)?,
        None => SweepGrid {
            m1: vec![0.0, 0.5, 2.0],
            alpha: vec![0.5, 1.0, 2.0],
            sigma: vec![1.0, 0.3, 0.1],
            ..SweepGrid::default()
        },
    };
    let mut base = ScenarioConfig::default_scenario();
    base.record_every = 10;
    let table = sweep(&base, &grid)?;
    print!("{}", table.cells_csv());
    println!();
    print!("{}", table.sigma_csv());
    Ok(())
}
