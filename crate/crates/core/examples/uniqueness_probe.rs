//! Continuous dependence: perturb the first displacement mode by `eps` and
//! track the difference energy against the unperturbed run.
//!
//! `cargo run --release --example uniqueness_probe`

use kirchhoff_heat::runner::{uniqueness_series, ScenarioConfig};
use kirchhoff_heat::Result;

fn main() -> Result<()> {
    let cfg = ScenarioConfig::default_scenario();
    let series = uniqueness_series(&cfg, &[0.0, 1e-2, 1e-4, 1e-5, 1e-6])?;
    println!(
        "{:>8}  {:>14}  {:>10}  bit-identical",
        "eps", "max diff E", "norm/eps"
    );
    for r in &series.reports {
        let ratio = r.ratio.map_or("-".to_string(), |x| format!("{x:.6}"));
        println!(
            "{:>8.0e}  {:>14.6e}  {ratio:>10}  {}",
            r.epsilon, r.max_difference_energy, r.bit_identical
        );
    }
    if let Some(s) = series.ratio_spread {
        println!("ratio spread over eps > 0: {s:.4}");
    }
    if let Some(h) = series.reports[0].blowup_horizon {
        println!("empirical E* blow-up horizon of the base run: {h:.3}");
    }
    Ok(())
}
