//! Command-line front end.
//!
//! Exit codes: 0 success, 1 failed checks or I/O error, 2 configuration
//! error, 3 solver divergence.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use kirchhoff_heat::runner::{self, ScenarioConfig, SweepGrid};
use kirchhoff_heat::Result;

#[derive(Parser)]
#[command(name = "kheat", version, about = "Kirchhoff-heat Galerkin simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario; write the trajectory CSV and diagnostics JSON.
    Simulate { config: PathBuf },
    /// Galerkin truncation study over increasing mode counts.
    Converge {
        config: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "8,16,32")]
        modes: Vec<usize>,
    },
    /// Compare the scenario with a perturbed copy `y0 + eps e_1`.
    ProbeUniqueness {
        config: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "1e-5")]
        eps: Vec<f64>,
    },
    /// Decay-rate table over a parameter grid (JSON).
    Sweep { config: PathBuf, grid: PathBuf },
    /// Run the invariant suite and print one line per check.
    Verify { config: PathBuf },
    /// Print the bundled default scenario.
    DefaultConfig,
}

fn run(cmd: Command) -> Result<u8> {
    match cmd {
        Command::Simulate { config } => {
            let cfg = ScenarioConfig::from_path(&config)?;
            let out = runner::run_scenario(&cfg)?;
            let (csv, json) = runner::write_scenario_outputs(&cfg, &out)?;
            println!("wrote {} and {}", csv.display(), json.display());
            println!(
                "E(0) = {:e}, E(T) = {:e}, energy_monotone = {}",
                out.diagnostics.initial_energy,
                out.diagnostics.final_energy,
                out.diagnostics.energy_monotone
            );
            Ok(0)
        }
        Command::Converge { config, modes } => {
            let cfg = ScenarioConfig::from_path(&config)?;
            let table = runner::convergence_study(&cfg, &modes)?;
            let dir = cfg.output.resolved_dir();
            fs::create_dir_all(&dir)?;
            let path = dir.join("convergence.csv");
            fs::write(&path, table.to_csv())?;
            print!("{}", table.to_csv());
            println!("strictly decreasing: {}", table.strictly_decreasing());
            println!("wrote {}", path.display());
            Ok(0)
        }
        Command::ProbeUniqueness { config, eps } => {
            let cfg = ScenarioConfig::from_path(&config)?;
            let series = runner::uniqueness_series(&cfg, &eps)?;
            for r in &series.reports {
                println!(
                    "eps = {:e}: max difference energy {:e}, ratio {}, bit-identical {}{}",
                    r.epsilon,
                    r.max_difference_energy,
                    r.ratio.map_or("-".into(), |x| format!("{x:.6}")),
                    r.bit_identical,
                    if r.horizon_breach {
                        ", note: run extends past the empirical E* blow-up horizon"
                    } else {
                        ""
                    }
                );
            }
            if let Some(s) = series.ratio_spread {
                println!("ratio spread: {s:.4}");
            }
            Ok(0)
        }
        Command::Sweep { config, grid } => {
            let cfg = ScenarioConfig::from_path(&config)?;
            let text = fs::read_to_string(&grid).map_err(|e| kirchhoff_heat::Error::Config {
                field: grid.display().to_string(),
                message: e.to_string(),
            })?;
            let grid = SweepGrid::from_json_str(&text)?;
            let table = runner::sweep(&cfg, &grid)?;
            let dir = cfg.output.resolved_dir();
            fs::create_dir_all(&dir)?;
            fs::write(dir.join("sweep.csv"), table.cells_csv())?;
            print!("{}", table.cells_csv());
            if !table.sigma_rows.is_empty() {
                fs::write(dir.join("sweep_sigma.csv"), table.sigma_csv())?;
                print!("{}", table.sigma_csv());
            }
            Ok(0)
        }
        Command::Verify { config } => {
            let cfg = ScenarioConfig::from_path(&config)?;
            let report = runner::verify(&cfg)?;
            for c in &report.checks {
                let tag = if c.passed { "PASS" } else { "FAIL" };
                println!("{tag} {}: {}", c.name, c.detail);
            }
            Ok(if report.all_passed() { 0 } else { 1 })
        }
        Command::DefaultConfig => {
            println!("{}", ScenarioConfig::default_scenario().to_json_pretty());
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(runner::exit_code(&e) as u8)
        }
    }
}
