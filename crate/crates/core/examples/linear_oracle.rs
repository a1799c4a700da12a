//! The single-mode linear system `m0 = alpha = beta = lambda = 1` has the
//! characteristic polynomial `s^3 + s^2 + 2 s + 1`; its energy decays at
//! twice the spectral abscissa. Compare the fitted rate with the roots.
//!
//! `cargo run --example linear_oracle`

use std::f64::consts::PI;

use kirchhoff_heat::diagnostics::{fit_exponential_decay, FitWindow};
use kirchhoff_heat::model::linear_system_matrix;
use kirchhoff_heat::{
    build_basis, simulate, Domain, ModalState, ModelParams, Result, StepperConfig,
};

fn main() -> Result<()> {
    let params = ModelParams::new(1.0, 0.0, 1.0, 1.0)?;
    let basis = build_basis(Domain::interval(PI)?, 1)?;
    println!("mode matrix: {:?}", linear_system_matrix(&params, 1.0)?);

    // Real root by bisection, then the complex pair from deflation.
    let p = |s: f64| s * s * s + s * s + 2.0 * s + 1.0;
    let (mut lo, mut hi) = (-1.0, 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if p(mid) < 0.0 {
            lo = mid
        } else {
            hi = mid
        }
    }
    let r = 0.5 * (lo + hi);
    let re = -(1.0 + r) / 2.0;
    println!(
        "roots: {r:.8}, {re:.8} +- i..., predicted energy rate {:.6}",
        -2.0 * re
    );

    let init = ModalState::new(vec![1.0], vec![0.0], vec![0.0])?;
    let t_end = 40.0;
    for (name, cfg) in [
        ("midpoint", StepperConfig::midpoint(1e-3)),
        ("rk4", StepperConfig::rk4(1e-2)),
    ] {
        let traj = simulate(&cfg, &params, &basis, &init, t_end, 10)?;
        let fit = fit_exponential_decay(&traj.records, FitWindow::default_for(t_end))?;
        println!(
            "{name:>8}: fitted omega {:.6}, r^2 {:.4}",
            fit.omega, fit.r_squared
        );
    }
    Ok(())
}
