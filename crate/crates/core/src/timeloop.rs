//! Time integration of the Galerkin system.
//!
//! The implicit midpoint rule `x' = x + dt f((x + x')/2)` is solved by
//! iterating on the only nonlinear quantity, the midpoint gradient norm
//! `S((h + h')/2)`. For a frozen Kirchhoff coefficient the midpoint
//! equation decouples into one 3x3 linear system per mode, solved exactly,
//! so the iteration stays A-stable however stiff the heat modes are. A
//! secant iteration on the same scalar is the fallback when plain
//! fixed-point iteration stalls.

use serde::{Deserialize, Serialize};

use crate::diagnostics::{self, EnergyRecord};
use crate::error::{Error, Result};
use crate::model::{
    self, kirchhoff_coefficient, mode_matrix, weighted_sq, ModalState, ModelParams,
};
use crate::spectrum::{Domain, EigenBasis};

/// Largest `dt * lambda_max` accepted for RK4.
pub const RK4_STABILITY_LIMIT: f64 = 2.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ImplicitMidpoint,
    Rk4,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepperConfig {
    pub method: Method,
    pub dt: f64,
    pub newton_tol: f64,
    pub newton_max_iter: usize,
}

impl StepperConfig {
    pub fn midpoint(dt: f64) -> Self {
        Self {
            method: Method::ImplicitMidpoint,
            dt,
            newton_tol: 1e-14,
            newton_max_iter: 50,
        }
    }

    pub fn rk4(dt: f64) -> Self {
        Self {
            method: Method::Rk4,
            ..Self::midpoint(dt)
        }
    }

    pub fn with_dt(self, dt: f64) -> Self {
        Self { dt, ..self }
    }

    pub fn validate(&self, basis: &EigenBasis) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::invalid(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        if !(self.newton_tol > 0.0) {
            return Err(Error::invalid(format!(
                "newton_tol must be positive, got {}",
                self.newton_tol
            )));
        }
        if self.newton_max_iter == 0 {
            return Err(Error::invalid("newton_max_iter must be at least 1"));
        }
        if self.method == Method::Rk4 && self.dt * basis.lambda_max() > RK4_STABILITY_LIMIT {
            return Err(Error::invalid(format!(
                "rk4 needs dt * lambda_max <= {RK4_STABILITY_LIMIT}, got {} * {} = {}",
                self.dt,
                basis.lambda_max(),
                self.dt * basis.lambda_max()
            )));
        }
        Ok(())
    }
}

/// `dt = 0.1 / sqrt(phi(S0) lambda_max)`, resolving the fastest Kirchhoff
/// oscillation of the initial state.
pub fn default_dt(params: &ModelParams, basis: &EigenBasis, initial: &ModalState) -> Result<f64> {
    let s0 = model::grad_norm_sq(basis, &initial.h)?;
    let phi = kirchhoff_coefficient(params, s0)?;
    Ok(0.1 / (phi * basis.lambda_max()).sqrt())
}

/// Advance `state` by `config.dt`.
pub fn step(
    config: &StepperConfig,
    params: &ModelParams,
    basis: &EigenBasis,
    state: &ModalState,
) -> Result<ModalState> {
    config.validate(basis)?;
    state.check_shape(basis.n_modes())?;
    if !state.is_finite() {
        return Err(Error::NumericFault {
            t: state.t,
            what: "non-finite state entering step".into(),
        });
    }
    let next = match config.method {
        Method::ImplicitMidpoint => midpoint_step(config, params, basis, state)?,
        Method::Rk4 => rk4_step(config.dt, params, basis, state)?,
    };
    if !next.is_finite() {
        return Err(Error::NumericFault {
            t: next.t,
            what: "non-finite state after step".into(),
        });
    }
    Ok(next)
}

fn solve3(a: [[f64; 3]; 3], b: [f64; 3]) -> [f64; 3] {
    // Cramer's rule; the midpoint matrix I - dt/2 A is nonsingular for
    // every dt because A has eigenvalues in the closed left half-plane.
    let det = |m: [[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det(a);
    let mut x = [0.0; 3];
    for (col, xi) in x.iter_mut().enumerate() {
        let mut m = a;
        for row in 0..3 {
            m[row][col] = b[row];
        }
        *xi = det(m) / d;
    }
    x
}

/// Midpoint update with the Kirchhoff coefficient frozen at `phi`.
fn frozen_midpoint(
    dt: f64,
    phi: f64,
    params: &ModelParams,
    basis: &EigenBasis,
    state: &ModalState,
    out: &mut ModalState,
) {
    let half = 0.5 * dt;
    for (k, &lam) in basis.lambdas().iter().enumerate() {
        let a = mode_matrix(params, phi, lam);
        let x = [state.h[k], state.v[k], state.c[k]];
        let mut lhs = [[0.0; 3]; 3];
        let mut rhs = [0.0; 3];
        for i in 0..3 {
            for j in 0..3 {
                let id = if i == j { 1.0 } else { 0.0 };
                lhs[i][j] = id - half * a[i][j];
                rhs[i] += (id + half * a[i][j]) * x[j];
            }
        }
        let y = solve3(lhs, rhs);
        out.h[k] = y[0];
        out.v[k] = y[1];
        out.c[k] = y[2];
    }
}

fn midpoint_gradient_norm(basis: &EigenBasis, a: &[f64], b: &[f64]) -> f64 {
    basis
        .lambdas()
        .iter()
        .zip(a.iter().zip(b))
        .map(|(l, (x, y))| {
            let m = 0.5 * (x + y);
            l * m * m
        })
        .sum()
}

/// Max-norm residual of `x' - x - dt f((x + x')/2)`, relative to
/// `1 + max |x'|`.
fn midpoint_residual(
    dt: f64,
    params: &ModelParams,
    basis: &EigenBasis,
    state: &ModalState,
    next: &ModalState,
) -> Result<f64> {
    let mid = state.midpoint(next);
    let f = model::rhs(params, basis, &mid)?;
    let mut r: f64 = 0.0;
    for k in 0..basis.n_modes() {
        r = r
            .max((next.h[k] - state.h[k] - dt * f.dh[k]).abs())
            .max((next.v[k] - state.v[k] - dt * f.dv[k]).abs())
            .max((next.c[k] - state.c[k] - dt * f.dc[k]).abs());
    }
    Ok(r / (1.0 + next.max_abs()))
}

fn midpoint_step(
    config: &StepperConfig,
    params: &ModelParams,
    basis: &EigenBasis,
    state: &ModalState,
) -> Result<ModalState> {
    let dt = config.dt;
    let mut next = ModalState {
        t: state.t + dt,
        ..ModalState::zeros(basis.n_modes())
    };
    let s_start = weighted_sq(basis.lambdas(), &state.h);
    let phi_of = |s: f64| params.m0() + params.m1() * s;

    if params.is_linear() {
        frozen_midpoint(dt, params.m0(), params, basis, state, &mut next);
        return Ok(next);
    }

    // g(s) = S_mid(s) - s, where S_mid(s) is the midpoint gradient norm
    // produced by the update with phi frozen at phi(s).
    let eval = |s: f64, next: &mut ModalState| {
        frozen_midpoint(dt, phi_of(s), params, basis, state, next);
        midpoint_gradient_norm(basis, &state.h, &next.h)
    };
    let converged = |a: f64, b: f64| (a - b).abs() <= config.newton_tol * (1.0 + a.abs());

    let mut s = s_start;
    let mut iterations = 0;
    let mut prev: Option<(f64, f64)> = None;
    let mut done = false;
    while iterations < config.newton_max_iter {
        iterations += 1;
        let s_new = eval(s, &mut next);
        if converged(s_new, s) {
            done = true;
            break;
        }
        prev = Some((s, s_new - s));
        s = s_new;
    }

    if !done {
        // secant on g, seeded with the last two fixed-point iterates
        let (mut s0, mut g0) = prev.unwrap_or((s_start, 0.0));
        let mut s1 = s;
        let mut g1 = eval(s1, &mut next) - s1;
        for _ in 0..config.newton_max_iter {
            iterations += 1;
            let denom = g1 - g0;
            if denom == 0.0 || !denom.is_finite() {
                break;
            }
            let s2 = (s1 - g1 * (s1 - s0) / denom).max(0.0);
            let g2 = eval(s2, &mut next) - s2;
            (s0, g0, s1, g1) = (s1, g1, s2, g2);
            if converged(s1 + g1, s1) {
                done = true;
                break;
            }
        }
        if !done {
            return Err(Error::SolverDivergence {
                t: state.t,
                iterations,
                residual: midpoint_residual(dt, params, basis, state, &next).unwrap_or(f64::NAN),
            });
        }
    }
    Ok(next)
}

fn axpy(state: &ModalState, a: f64, r: &model::StateRate) -> ModalState {
    let f = |x: &[f64], d: &[f64]| x.iter().zip(d).map(|(x, d)| x + a * d).collect();
    ModalState {
        t: state.t,
        h: f(&state.h, &r.dh),
        v: f(&state.v, &r.dv),
        c: f(&state.c, &r.dc),
    }
}

fn rk4_step(
    dt: f64,
    params: &ModelParams,
    basis: &EigenBasis,
    s: &ModalState,
) -> Result<ModalState> {
    let k1 = model::rhs(params, basis, s)?;
    let k2 = model::rhs(params, basis, &axpy(s, 0.5 * dt, &k1))?;
    let k3 = model::rhs(params, basis, &axpy(s, 0.5 * dt, &k2))?;
    let k4 = model::rhs(params, basis, &axpy(s, dt, &k3))?;
    let comb = |x: &[f64], a: &[f64], b: &[f64], c: &[f64], d: &[f64]| {
        (0..x.len())
            .map(|i| x[i] + dt / 6.0 * (a[i] + 2.0 * b[i] + 2.0 * c[i] + d[i]))
            .collect()
    };
    Ok(ModalState {
        t: s.t + dt,
        h: comb(&s.h, &k1.dh, &k2.dh, &k3.dh, &k4.dh),
        v: comb(&s.v, &k1.dv, &k2.dv, &k3.dv, &k4.dv),
        c: comb(&s.c, &k1.dc, &k2.dc, &k3.dc, &k4.dc),
    })
}

/// Which full states a trajectory keeps. Energy records are always kept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateRetention {
    /// A state at every record.
    #[default]
    All,
    /// A state at every n-th record, plus the final one.
    EveryNthRecord(usize),
    /// Initial and final state only.
    Endpoints,
}

/// Enough of the basis to interpret a trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisSummary {
    pub domain: Domain,
    pub n_modes: usize,
    pub lambda_max: f64,
}

impl From<&EigenBasis> for BasisSummary {
    fn from(b: &EigenBasis) -> Self {
        Self {
            domain: b.domain(),
            n_modes: b.n_modes(),
            lambda_max: b.lambda_max(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub params: ModelParams,
    pub basis: BasisSummary,
    pub dt: f64,
    pub steps: usize,
    pub states: Vec<ModalState>,
    pub records: Vec<EnergyRecord>,
}

impl Trajectory {
    pub fn final_state(&self) -> &ModalState {
        self.states
            .last()
            .expect("trajectory keeps its final state")
    }

    pub fn times(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.t).collect()
    }

    pub fn energies(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.energy).collect()
    }
}

/// Number of steps to reach `t_end`; the last step is shortened when
/// `t_end` is not a multiple of `dt`.
pub fn step_count(dt: f64, t_end: f64) -> usize {
    let q = t_end / dt;
    let r = q.round();
    if (q - r).abs() <= 1e-9 * q.max(1.0) {
        r as usize
    } else {
        q.ceil() as usize
    }
}

pub fn simulate(
    config: &StepperConfig,
    params: &ModelParams,
    basis: &EigenBasis,
    initial: &ModalState,
    t_end: f64,
    record_every: usize,
) -> Result<Trajectory> {
    simulate_with(
        config,
        params,
        basis,
        initial,
        t_end,
        record_every,
        StateRetention::All,
    )
}

pub fn simulate_with(
    config: &StepperConfig,
    params: &ModelParams,
    basis: &EigenBasis,
    initial: &ModalState,
    t_end: f64,
    record_every: usize,
    retention: StateRetention,
) -> Result<Trajectory> {
    config.validate(basis)?;
    initial.check_shape(basis.n_modes())?;
    if !initial.is_finite() {
        return Err(Error::NumericFault {
            t: 0.0,
            what: "non-finite initial data".into(),
        });
    }
    if !(t_end.is_finite() && t_end >= config.dt * (1.0 - 1e-12)) {
        return Err(Error::invalid(format!(
            "t_end must be at least dt = {}, got {t_end}",
            config.dt
        )));
    }
    if record_every == 0 {
        return Err(Error::invalid("record_every must be at least 1"));
    }
    let steps = step_count(config.dt, t_end);
    let keep_every = match retention {
        StateRetention::All => Some(1),
        StateRetention::EveryNthRecord(n) => Some(n.max(1)),
        StateRetention::Endpoints => None,
    };

    let mut state = ModalState {
        t: 0.0,
        ..initial.clone()
    };
    let mut records = Vec::with_capacity(steps / record_every + 2);
    let mut states = vec![state.clone()];
    records.push(diagnostics::energy(params, basis, &state)?);

    let mut dissipated = 0.0;
    for i in 1..=steps {
        let t_next = if i == steps {
            t_end
        } else {
            i as f64 * config.dt
        };
        let cfg = config.with_dt(t_next - state.t);
        let mut next = step(&cfg, params, basis, &state).map_err(|e| e.at_time(state.t))?;
        next.t = t_next;
        let mid = state.midpoint(&next);
        dissipated -= cfg.dt * diagnostics::dissipation_rate(params, basis, &mid)?;
        state = next;

        if i % record_every == 0 || i == steps {
            let mut rec = diagnostics::energy(params, basis, &state)?;
            rec.dissipated = dissipated;
            records.push(rec);
            let idx = records.len() - 1;
            let keep = i == steps || keep_every.is_some_and(|n| idx % n == 0);
            if keep {
                states.push(state.clone());
            }
        }
    }
    Ok(Trajectory {
        params: *params,
        basis: basis.into(),
        dt: config.dt,
        steps,
        states,
        records,
    })
}
