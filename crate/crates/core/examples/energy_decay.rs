//! Run the bundled nonlinear scenario, write its trajectory CSV and
//! diagnostics JSON, and summarize the energy budget.
//!
//! `cargo run --release --example energy_decay [config.json]`
//! Output goes to `output/` or `$KHEAT_OUTPUT_DIR`.

use kirchhoff_heat::runner::{run_scenario, write_scenario_outputs, ScenarioConfig};
use kirchhoff_heat::Result;

fn main() -> Result<()> {
    let cfg = match std::env::args().nth(1) {
        Some(path) => ScenarioConfig::from_path(path)?,
        None => ScenarioConfig::default_scenario(),
    };
    let run = run_scenario(&cfg)?;
    let d = &run.diagnostics;
    println!("{} modes, dt = {}, {} steps", d.n_modes, d.dt, d.steps);
    println!(
        "E(0) = {:.6e}, E(T) = {:.6e}",
        d.initial_energy, d.final_energy
    );
    println!(
        "monotone: {} (max increment {:.2e})",
        d.energy_monotone, d.max_energy_increment
    );
    println!(
        "a-priori estimate holds: {} (margin {:.2e})",
        d.first_apriori.holds, d.first_apriori.worst_margin
    );
    if let Some(err) = d.dissipation_identity_error {
        println!("dE/dt vs D relative error: {err:.2e}");
    }
    match &d.decay_fit {
        Some(f) => println!(
            "E(t) ~ {:.4} E(0) exp(-{:.5} t), r^2 = {:.5}",
            f.c, f.omega, f.r_squared
        ),
        None => println!(
            "no decay fit: {}",
            d.decay_fit_note.as_deref().unwrap_or("-")
        ),
    }
    let last = run.trajectory.records.last().expect("nonempty");
    println!(
        "at T: kinetic {:.3e}, potential {:.3e} + {:.3e}, thermal {:.3e}, dissipated {:.6e}",
        last.kinetic,
        last.potential_linear,
        last.potential_kirchhoff,
        last.thermal,
        last.dissipated
    );
    let (csv, json) = write_scenario_outputs(&cfg, &run)?;
    println!("wrote {} and {}", csv.display(), json.display());
    Ok(())
}
