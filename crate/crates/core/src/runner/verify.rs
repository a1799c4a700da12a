//! The invariant suite behind `kheat verify`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{InitialData, Profile, ScenarioConfig};
use super::studies::{random_small_data_configs, run_scenario_with, MONOTONE_REL_TOL};
use crate::diagnostics;
use crate::error::Result;
use crate::timeloop::StateRetention;

/// Relative tolerance for the centered-difference dissipation identity.
pub const DISSIPATION_IDENTITY_TOL: f64 = 1e-4;
/// Accepted band for the error ratio when `dt` is halved (second order).
pub const HALVING_RATIO_BAND: (f64, f64) = (2.8, 5.2);
pub const DECAY_R2_MIN: f64 = 0.99;
/// Random scenarios checked by `verify`.
pub const RANDOM_SCENARIOS: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn check(name: &str, passed: bool, detail: String) -> CheckResult {
    CheckResult {
        name: name.into(),
        passed,
        detail,
    }
}

fn halved(cfg: &ScenarioConfig, dt: f64) -> ScenarioConfig {
    let mut c = cfg.clone();
    c.stepper.dt = Some(dt / 2.0);
    c.record_every = 1;
    c
}

/// Run the invariant suite on `config`. Errors from the base scenario
/// propagate; failing checks are reported, not raised.
pub fn verify(config: &ScenarioConfig) -> Result<VerifyReport> {
    let mut checks = Vec::new();

    let mut fine = config.clone();
    fine.record_every = 1;
    let base = run_scenario_with(&fine, StateRetention::Endpoints)?;
    let dt = base.diagnostics.dt;
    let recs = &base.trajectory.records;
    let e0 = base.diagnostics.initial_energy;

    checks.push(check(
        "energy_monotone",
        base.diagnostics.energy_monotone,
        format!(
            "max increment {:.3e}, allowed {:.3e}",
            base.diagnostics.max_energy_increment,
            MONOTONE_REL_TOL * e0
        ),
    ));
    let ap = base.diagnostics.first_apriori;
    checks.push(check(
        "first_apriori_estimate",
        ap.holds,
        format!(
            "worst margin {:.3e} (tolerance {:.3e})",
            ap.worst_margin, ap.tolerance
        ),
    ));

    let half = run_scenario_with(&halved(config, dt), StateRetention::Endpoints)?;
    let err1 = diagnostics::dissipation_identity_error(recs)?;
    let err2 = diagnostics::dissipation_identity_error(&half.trajectory.records)?;
    checks.push(check(
        "dissipation_identity",
        err1 <= DISSIPATION_IDENTITY_TOL,
        format!("relative error {err1:.3e} at dt = {dt:e}"),
    ));
    let ratio = err1 / err2;
    checks.push(check(
        "dissipation_identity_order",
        ratio >= HALVING_RATIO_BAND.0 && ratio <= HALVING_RATIO_BAND.1,
        format!("error ratio {ratio:.3} on halving dt"),
    ));
    let r1 = diagnostics::energy_balance_residual(recs)?;
    let r2 = diagnostics::energy_balance_residual(&half.trajectory.records)?;
    let floor = 1e-13 * e0.max(f64::MIN_POSITIVE);
    let bal_ok = (r1 <= floor && r2 <= floor)
        || (r1 / r2 >= HALVING_RATIO_BAND.0 && r1 / r2 <= HALVING_RATIO_BAND.1);
    checks.push(check(
        "energy_balance_order",
        bal_ok,
        format!("residual {r1:.3e} -> {r2:.3e} on halving dt"),
    ));

    let (decay_ok, decay_detail) = match &base.diagnostics.decay_fit {
        Some(f) => (
            f.decaying && f.r_squared >= DECAY_R2_MIN,
            format!("omega {:.5}, r^2 {:.5}, C {:.4}", f.omega, f.r_squared, f.c),
        ),
        None => (
            false,
            base.diagnostics
                .decay_fit_note
                .clone()
                .unwrap_or_else(|| "no fit".into()),
        ),
    };
    checks.push(check("exponential_decay", decay_ok, decay_detail));

    let mut zero = config.clone();
    zero.initial = InitialData::default();
    let z = run_scenario_with(&zero, StateRetention::All)?;
    let zero_ok = z.trajectory.records.iter().all(|r| {
        r.energy == 0.0 && r.higher_energy == 0.0 && r.dissipation == 0.0 && r.dissipated == 0.0
    }) && z.trajectory.states.iter().all(|s| s.max_abs() == 0.0);
    checks.push(check(
        "zero_data_exact",
        zero_ok,
        format!("{} records", z.trajectory.records.len()),
    ));

    checks.push(sign_symmetry(config)?);

    let randoms = random_small_data_configs(config.seed, RANDOM_SCENARIOS);
    let outcomes: Vec<Result<(bool, bool)>> = randoms
        .par_iter()
        .map(|c| {
            let r = run_scenario_with(c, StateRetention::Endpoints)?;
            Ok((
                r.diagnostics.energy_monotone,
                r.diagnostics.first_apriori.holds,
            ))
        })
        .collect();
    let mut mono = 0;
    let mut apri = 0;
    let mut failed = 0;
    for o in &outcomes {
        match o {
            Ok((m, a)) => {
                mono += usize::from(*m);
                apri += usize::from(*a);
            }
            Err(_) => failed += 1,
        }
    }
    checks.push(check(
        "random_small_data",
        mono == RANDOM_SCENARIOS && apri == RANDOM_SCENARIOS,
        format!(
            "seed {}: {mono}/{RANDOM_SCENARIOS} monotone, {apri}/{RANDOM_SCENARIOS} a-priori, {failed} errors",
            config.seed
        ),
    ));

    Ok(VerifyReport { checks })
}

/// `(alpha, beta) -> (-alpha, -beta)` with `theta0 -> -theta0` maps
/// trajectories to `(h, v, -c)`.
fn sign_symmetry(config: &ScenarioConfig) -> Result<CheckResult> {
    let mut flipped = config.clone();
    flipped.params = config
        .params
        .with_coupling(-config.params.alpha(), -config.params.beta())?;
    let neg = |p: &Profile| match p {
        Profile::Zero => Profile::Zero,
        Profile::SineMode { mode, amplitude } => Profile::SineMode {
            mode: *mode,
            amplitude: -amplitude,
        },
        Profile::Bump { amplitude, power } => Profile::Bump {
            amplitude: -amplitude,
            power: *power,
        },
        Profile::Coefficients { values } => Profile::Coefficients {
            values: values.iter().map(|v| -v).collect(),
        },
    };
    flipped.initial.temperature = neg(&config.initial.temperature);
    let a = run_scenario_with(config, StateRetention::All)?.trajectory;
    let b = run_scenario_with(&flipped, StateRetention::All)?.trajectory;
    let mut worst: f64 = 0.0;
    for (x, y) in a.states.iter().zip(&b.states) {
        for k in 0..x.n_modes() {
            worst = worst
                .max((x.h[k] - y.h[k]).abs())
                .max((x.v[k] - y.v[k]).abs())
                .max((x.c[k] + y.c[k]).abs());
        }
    }
    for (x, y) in a.records.iter().zip(&b.records) {
        worst = worst.max((x.energy - y.energy).abs());
    }
    Ok(check(
        "coupling_sign_symmetry",
        worst <= 1e-12,
        format!("max deviation {worst:.3e}"),
    ))
}
