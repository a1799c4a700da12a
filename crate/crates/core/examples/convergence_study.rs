//! Galerkin truncation study: the same bump data on 8, 16, 32 and 64 modes.
//!
//! `cargo run --release --example convergence_study`

use kirchhoff_heat::runner::{convergence_study, ScenarioConfig};
use kirchhoff_heat::Result;

fn main() -> Result<()> {
    let cfg = ScenarioConfig::default_scenario();
    let table = convergence_study(&cfg, &[8, 16, 32, 64])?;
    println!("shared dt = {}", table.dt);
    print!("{}", table.to_csv());
    for w in table.rows.windows(2) {
        println!(
            "energy discrepancy ratio {}->{}: {:.4}",
            w[1].n_coarse,
            w[1].n_fine,
            w[1].energy_discrepancy / w[0].energy_discrepancy
        );
    }
    println!("strictly decreasing: {}", table.strictly_decreasing());
    Ok(())
}
