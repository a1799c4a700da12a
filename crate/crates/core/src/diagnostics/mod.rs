//! Energies, the dissipation identity, a-priori bounds, decay fits and the
//! integral-inequality checkers.
//!
//! Every gradient-type integral is evaluated in modal form
//! (`int |grad u|^2 = sum lambda_k u_k^2`, `int |Laplace u|^2 = sum lambda_k^2 u_k^2`),
//! which is exact by orthonormality of the basis.

mod decay;
mod inequalities;

pub use decay::{fit_exponential_decay, fit_log_linear, DecayFit, FitWindow, DEFAULT_FLOOR};
pub use inequalities::{check_martinez, check_modified_gronwall, GronwallReport, MartinezReport};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{weighted_sq, ModalState, ModelParams};
use crate::spectrum::EigenBasis;

/// Energy diagnostics at one recorded instant.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EnergyRecord {
    pub t: f64,
    /// first-order energy `E`
    pub energy: f64,
    /// higher-order energy `E*`
    pub higher_energy: f64,
    /// dissipation rate `D = -(alpha/beta) sum lambda_k c_k^2`
    pub dissipation: f64,
    pub kinetic: f64,
    pub potential_linear: f64,
    pub potential_kirchhoff: f64,
    pub thermal: f64,
    /// squared gradient norm `S`
    pub grad_norm_sq: f64,
    /// `-int_0^t D`, accumulated by the time loop one step at a time
    /// (`dt * D` at the step midpoint).
    pub dissipated: f64,
}

impl EnergyRecord {
    pub fn component_sum(&self) -> f64 {
        self.kinetic + self.potential_linear + self.potential_kirchhoff + self.thermal
    }
}

/// Energy functional and its breakdown, plus `E*`, `D` and `S` at `state`.
///
/// `E = 1/2 |v|^2 + m0/2 S + m1/4 S^2 + alpha/(2 beta) |c|^2`.
pub fn energy(
    params: &ModelParams,
    basis: &EigenBasis,
    state: &ModalState,
) -> Result<EnergyRecord> {
    state.check_shape(basis.n_modes())?;
    let lam = basis.lambdas();
    let s = weighted_sq(lam, &state.h);
    let kinetic = 0.5 * sum_sq(&state.v);
    let potential_linear = 0.5 * params.m0() * s;
    let potential_kirchhoff = 0.25 * params.m1() * s * s;
    let thermal = 0.5 * params.coupling_ratio() * sum_sq(&state.c);
    Ok(EnergyRecord {
        t: state.t,
        energy: kinetic + potential_linear + potential_kirchhoff + thermal,
        higher_energy: higher_energy_unchecked(params, lam, state, s),
        dissipation: -params.coupling_ratio() * weighted_sq(lam, &state.c),
        kinetic,
        potential_linear,
        potential_kirchhoff,
        thermal,
        grad_norm_sq: s,
        dissipated: 0.0,
    })
}

fn sum_sq(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

/// `-(alpha/beta) sum lambda_k c_k^2`; nonpositive because `alpha beta > 0`.
pub fn dissipation_rate(
    params: &ModelParams,
    basis: &EigenBasis,
    state: &ModalState,
) -> Result<f64> {
    state.check_shape(basis.n_modes())?;
    Ok(-params.coupling_ratio() * weighted_sq(basis.lambdas(), &state.c))
}

/// `E* = |grad v|^2 + (m0 + m1 S) |Laplace h|^2 + (alpha/beta) |grad c|^2`.
pub fn higher_energy(params: &ModelParams, basis: &EigenBasis, state: &ModalState) -> Result<f64> {
    state.check_shape(basis.n_modes())?;
    let lam = basis.lambdas();
    let s = weighted_sq(lam, &state.h);
    Ok(higher_energy_unchecked(params, lam, state, s))
}

fn higher_energy_unchecked(params: &ModelParams, lam: &[f64], state: &ModalState, s: f64) -> f64 {
    let lap_sq: f64 = lam.iter().zip(&state.h).map(|(l, h)| l * l * h * h).sum();
    weighted_sq(lam, &state.v)
        + (params.m0() + params.m1() * s) * lap_sq
        + params.coupling_ratio() * weighted_sq(lam, &state.c)
}

/// Max over records of `|E(t_i) - E(0) - int_0^{t_i} D|`, the integral taken
/// by the trapezoid rule on the records.
pub fn energy_balance_residual(records: &[EnergyRecord]) -> Result<f64> {
    if records.len() < 2 {
        return Err(Error::invalid(format!(
            "energy balance needs at least 2 records, got {}",
            records.len()
        )));
    }
    let e0 = records[0].energy;
    let mut integral = 0.0;
    let mut worst: f64 = 0.0;
    for w in records.windows(2) {
        integral += 0.5 * (w[1].t - w[0].t) * (w[0].dissipation + w[1].dissipation);
        worst = worst.max((w[1].energy - e0 - integral).abs());
    }
    Ok(worst)
}

/// Outcome of the first a-priori estimate along a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AprioriCheck {
    pub holds: bool,
    /// `min_i (2 E(0) + tol - lhs_i)`; negative when the estimate fails.
    pub worst_margin: f64,
    pub tolerance: f64,
}

/// Checks
/// `|v|^2 + (m0 + m1/2 S) S + (alpha/beta)|c|^2 + (2 alpha/beta) int_0^t sum lambda c^2 <= 2 E(0) + tol`
/// at every record, with `tol = rel_tol * E(0)`.
///
/// The left side is assembled from the stored components: it equals
/// `2 (kinetic + potential + thermal + dissipated)`.
pub fn first_apriori_check(records: &[EnergyRecord], rel_tol: f64) -> Result<AprioriCheck> {
    let first = records
        .first()
        .ok_or_else(|| Error::invalid("a-priori check needs at least one record"))?;
    let e0 = first.energy;
    let tolerance = rel_tol * e0;
    let worst_margin = records
        .iter()
        .map(|r| 2.0 * e0 + tolerance - 2.0 * (r.component_sum() + r.dissipated))
        .fold(f64::INFINITY, f64::min);
    Ok(AprioriCheck {
        holds: worst_margin >= 0.0,
        worst_margin,
        tolerance,
    })
}

/// Largest per-record energy increase `max_i (E_{i+1} - E_i)`, or 0 for
/// fewer than two records.
pub fn max_energy_increment(records: &[EnergyRecord]) -> f64 {
    records
        .windows(2)
        .map(|w| w[1].energy - w[0].energy)
        .fold(0.0, f64::max)
}

/// `E` nonincreasing up to `rel_tol * E(0)` per record.
pub fn energy_monotone(records: &[EnergyRecord], rel_tol: f64) -> bool {
    match records.first() {
        Some(r0) => max_energy_increment(records) <= rel_tol * r0.energy,
        None => true,
    }
}

/// Three-point derivative at interior sample `i`, second order on
/// nonuniform grids.
fn central_derivative(t: [f64; 3], f: [f64; 3]) -> f64 {
    let h1 = t[1] - t[0];
    let h2 = t[2] - t[1];
    -h2 / (h1 * (h1 + h2)) * f[0] + (h2 - h1) / (h1 * h2) * f[1] + h1 / (h2 * (h1 + h2)) * f[2]
}

/// Max over interior records of `|dE/dt - D|`, with `dE/dt` taken by
/// centered differences, divided by `max |D|` over the same records.
///
/// Returns 0 when the trajectory carries no dissipation at all.
pub fn dissipation_identity_error(records: &[EnergyRecord]) -> Result<f64> {
    if records.len() < 3 {
        return Err(Error::invalid(
            "dissipation identity needs at least 3 records",
        ));
    }
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for w in records.windows(3) {
        let de = central_derivative(
            [w[0].t, w[1].t, w[2].t],
            [w[0].energy, w[1].energy, w[2].energy],
        );
        worst = worst.max((de - w[1].dissipation).abs());
        scale = scale.max(w[1].dissipation.abs());
    }
    Ok(if scale > 0.0 { worst / scale } else { worst })
}

/// Empirical stand-in for the unknown constant in
/// `E*(t) <= E*(0) + C int_0^t E*^{3/2}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HigherEnergyBound {
    /// `max |dE*/dt| / E*^{3/2}` over interior records.
    pub c_est: f64,
    pub higher_energy_initial: f64,
    /// `2 / (C sqrt(E*(0)))`, where the Gronwall bound
    /// `(E*(0)^{-1/2} - C t / 2)^{-2}` ceases to exist; `None` when infinite.
    pub blowup_horizon: Option<f64>,
    pub t_end: f64,
    pub within_horizon: bool,
}

pub fn higher_energy_bound(records: &[EnergyRecord]) -> Result<HigherEnergyBound> {
    let first = records
        .first()
        .ok_or_else(|| Error::invalid("bound monitor needs at least one record"))?;
    let t_end = records.last().map_or(0.0, |r| r.t);
    let mut c_est: f64 = 0.0;
    for w in records.windows(3) {
        let es = w[1].higher_energy;
        if es <= 0.0 {
            continue;
        }
        let d = central_derivative(
            [w[0].t, w[1].t, w[2].t],
            [w[0].higher_energy, w[1].higher_energy, w[2].higher_energy],
        );
        c_est = c_est.max(d.abs() / es.powf(1.5));
    }
    let e0 = first.higher_energy;
    let blowup_horizon = if c_est > 0.0 && e0 > 0.0 {
        Some(2.0 / (c_est * e0.sqrt()))
    } else {
        None
    };
    Ok(HigherEnergyBound {
        c_est,
        higher_energy_initial: e0,
        blowup_horizon,
        t_end,
        within_horizon: blowup_horizon.is_none_or(|h| t_end < h),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::rhs;
    use crate::spectrum::{build_basis, Domain};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn line(n: usize) -> EigenBasis {
        build_basis(Domain::interval(PI).unwrap(), n).unwrap()
    }

    fn state(h: f64, v: f64, c: f64) -> ModalState {
        ModalState::new(vec![h], vec![v], vec![c]).unwrap()
    }

    #[test]
    fn energy_examples() {
        let b = line(1);
        let p = ModelParams::new(1.0, 2.0, 0.3, 0.7).unwrap();
        let r = energy(&p, &b, &state(1.0, 0.0, 0.0)).unwrap();
        assert!((r.energy - 1.0).abs() < 1e-14);
        assert_eq!(energy(&p, &b, &ModalState::zeros(1)).unwrap().energy, 0.0);
        let p = ModelParams::new(1.0, 2.0, 3.0, 1.0).unwrap();
        let r = energy(&p, &b, &state(0.0, 0.0, 2.0)).unwrap();
        assert!((r.energy - 6.0).abs() < 1e-14);
        assert!((r.energy - r.component_sum()).abs() <= 1e-12 * r.energy);
    }

    #[test]
    fn dissipation_examples() {
        let b = line(1);
        let p = ModelParams::new(1.0, 0.0, 2.0, 1.0).unwrap();
        assert!((dissipation_rate(&p, &b, &state(0.0, 0.0, 3.0)).unwrap() + 18.0).abs() < 1e-12);
        assert_eq!(
            dissipation_rate(&p, &b, &state(1.0, 1.0, 0.0)).unwrap(),
            0.0
        );
        let b2 = build_basis(Domain::interval(PI / 2.0).unwrap(), 1).unwrap();
        let p = ModelParams::new(1.0, 0.0, -1.0, -2.0).unwrap();
        assert!((dissipation_rate(&p, &b2, &state(0.0, 0.0, 1.0)).unwrap() + 2.0).abs() < 1e-12);
    }

    #[test]
    fn higher_energy_examples() {
        let b = line(1);
        let p = ModelParams::new(1.0, 1.0, 1.0, 1.0).unwrap();
        assert_eq!(higher_energy(&p, &b, &ModalState::zeros(1)).unwrap(), 0.0);
        assert!((higher_energy(&p, &b, &state(1.0, 0.0, 0.0)).unwrap() - 2.0).abs() < 1e-12);
        let b = build_basis(Domain::interval(PI / 2f64.sqrt()).unwrap(), 1).unwrap();
        assert!((b.lambdas()[0] - 2.0).abs() < 1e-12);
        assert!((higher_energy(&p, &b, &state(0.0, 1.0, 0.0)).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn balance_residual_needs_two_records() {
        assert!(energy_balance_residual(&[EnergyRecord::default()]).is_err());
        let zeros = vec![EnergyRecord::default(); 5];
        assert_eq!(energy_balance_residual(&zeros).unwrap(), 0.0);
    }

    #[test]
    fn apriori_detects_corruption() {
        let zero = vec![EnergyRecord::default(); 3];
        let c = first_apriori_check(&zero, 1e-8).unwrap();
        assert!(c.holds);
        assert_eq!(c.worst_margin, 0.0);

        let mut recs: Vec<EnergyRecord> = (0..4)
            .map(|i| EnergyRecord {
                t: i as f64,
                energy: 1.0,
                kinetic: 0.5,
                potential_linear: 0.5,
                ..Default::default()
            })
            .collect();
        assert!(first_apriori_check(&recs, 1e-8).unwrap().holds);
        let r = &mut recs[2];
        r.energy *= 2.0;
        r.kinetic *= 2.0;
        r.potential_linear *= 2.0;
        let c = first_apriori_check(&recs, 1e-8).unwrap();
        assert!(!c.holds);
        assert!(c.worst_margin < -1.0);
    }

    fn energy_gradient(
        p: &ModelParams,
        b: &EigenBasis,
        s: &ModalState,
    ) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        // dE/dh_k = (m0 + m1 S) lambda_k h_k, dE/dv_k = v_k, dE/dc_k = (alpha/beta) c_k
        let sn = weighted_sq(b.lambdas(), &s.h);
        let phi = p.m0() + p.m1() * sn;
        (
            b.lambdas()
                .iter()
                .zip(&s.h)
                .map(|(l, h)| phi * l * h)
                .collect(),
            s.v.clone(),
            s.c.iter().map(|c| p.coupling_ratio() * c).collect(),
        )
    }

    proptest! {
        #[test]
        fn dissipation_identity_along_rhs(
            h in prop::collection::vec(-1.0..1.0f64, 6),
            v in prop::collection::vec(-1.0..1.0f64, 6),
            c in prop::collection::vec(-1.0..1.0f64, 6),
            m1 in 0.0..2.0f64,
            alpha in 0.1..3.0f64,
            beta in 0.1..3.0f64,
            neg in any::<bool>(),
        ) {
            let b = line(6);
            let sgn = if neg { -1.0 } else { 1.0 };
            let p = ModelParams::new(0.8, m1, sgn * alpha, sgn * beta).unwrap();
            let s = ModalState::new(h, v, c).unwrap();
            let r = rhs(&p, &b, &s).unwrap();
            let (gh, gv, gc) = energy_gradient(&p, &b, &s);
            let de: f64 = gh.iter().zip(&r.dh).map(|(a, b)| a * b).sum::<f64>()
                + gv.iter().zip(&r.dv).map(|(a, b)| a * b).sum::<f64>()
                + gc.iter().zip(&r.dc).map(|(a, b)| a * b).sum::<f64>();
            let d = dissipation_rate(&p, &b, &s).unwrap();
            prop_assert!((de - d).abs() <= 1e-10 * (1.0 + d.abs()), "{} vs {}", de, d);
        }

        #[test]
        fn energy_invariant_under_coupling_sign_flip(
            h in prop::collection::vec(-1.0..1.0f64, 3),
            v in prop::collection::vec(-1.0..1.0f64, 3),
            c in prop::collection::vec(-1.0..1.0f64, 3),
            alpha in 0.1..3.0f64,
            beta in 0.1..3.0f64,
        ) {
            let b = line(3);
            let s = ModalState::new(h, v, c).unwrap();
            let p = ModelParams::new(1.0, 0.5, alpha, beta).unwrap();
            let q = p.with_coupling(-alpha, -beta).unwrap();
            let (a, z) = (energy(&p, &b, &s).unwrap(), energy(&q, &b, &s).unwrap());
            prop_assert_eq!(a.energy, z.energy);
            prop_assert_eq!(a.higher_energy, z.higher_energy);
            prop_assert_eq!(a.dissipation, z.dissipation);
            prop_assert!(a.energy >= 0.0 && a.higher_energy >= 0.0 && a.dissipation <= 0.0);
            prop_assert!((a.energy - a.component_sum()).abs() <= 1e-12 * a.energy.max(1e-300));
        }
    }
}
