//! The two integral-inequality checkers on synthetic data: a Riccati
//! equality case for the modified Gronwall bound, and exponential and
//! polynomial energies for the decay criterion.
//!
//! `cargo run --example inequality_checkers`

use kirchhoff_heat::diagnostics::{check_martinez, check_modified_gronwall};
use kirchhoff_heat::Result;

fn main() -> Result<()> {
    let t: Vec<f64> = (0..=1500).map(|i| i as f64 * 1e-3).collect();
    let f = vec![1.0; t.len()];
    let g: Vec<f64> = t
        .iter()
        .map(|&s| if s < 1.0 { 0.9 / (1.0 - 0.9 * s) } else { 0.0 })
        .collect();
    let rep = check_modified_gronwall(&t, &g, &f, 1.0, 1.0)?;
    println!("Gronwall, f = 1, K = 1, r = 1:");
    println!(
        "  blow-up time {:?}, hypothesis {}, bound holds {}",
        rep.blowup_time, rep.hypothesis_holds, rep.holds
    );
    for i in [0, 500, 900, 990] {
        println!(
            "  B({:.3}) = {:.6}  (1/(1-t) = {:.6})",
            t[i],
            rep.bound[i],
            1.0 / (1.0 - t[i])
        );
    }

    let t: Vec<f64> = (0..=3000).map(|i| i as f64 * 0.01).collect();
    let exp: Vec<f64> = t.iter().map(|s| (-2.0 * s).exp()).collect();
    let rep = check_martinez(&t, &exp, 0.0)?;
    println!("decay criterion on exp(-2t), mu = 0:");
    println!(
        "  omega_est {:.6}, envelope dominates {}",
        rep.omega_est, rep.bound_holds
    );

    let t: Vec<f64> = (0..=200_000).map(|i| i as f64 * 0.01).collect();
    let poly: Vec<f64> = t.iter().map(|s| (1.0 + s).powi(-2)).collect();
    let rep = check_martinez(&t, &poly, 0.5)?;
    println!("decay criterion on (1+t)^-2, mu = 1/2:");
    println!(
        "  omega_est {:.4}, tail E(T)/E(0) = {:.1e} (small enough: {}), envelope dominates {}",
        rep.omega_est, rep.tail_ratio, rep.tail_ok, rep.bound_holds
    );
    Ok(())
}
