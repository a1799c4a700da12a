//! The coupled Kirchhoff-heat system in modal coordinates.
//!
//! With `y = sum h_k e_k`, `theta = sum c_k e_k` and the Laplacian acting as
//! `-lambda_k` on mode `k`, the Galerkin system reads
//!
//! ```text
//! h_k' = v_k
//! v_k' = -phi(S) lambda_k h_k + alpha lambda_k c_k
//! c_k' = -lambda_k c_k - beta lambda_k v_k
//! ```
//!
//! where `S = sum lambda_k h_k^2` is the squared gradient norm and
//! `phi(s) = m0 + m1 s` the Kirchhoff coefficient.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectrum::EigenBasis;

/// Kirchhoff constants and coupling coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams")]
pub struct ModelParams {
    m0: f64,
    m1: f64,
    alpha: f64,
    beta: f64,
}

#[derive(Deserialize)]
struct RawParams {
    m0: f64,
    m1: f64,
    alpha: f64,
    beta: f64,
}

impl TryFrom<RawParams> for ModelParams {
    type Error = Error;

    fn try_from(r: RawParams) -> Result<Self> {
        ModelParams::new(r.m0, r.m1, r.alpha, r.beta)
    }
}

impl ModelParams {
    pub fn new(m0: f64, m1: f64, alpha: f64, beta: f64) -> Result<Self> {
        if !(m0.is_finite() && m0 > 0.0) {
            return Err(Error::invalid(format!(
                "m0 must be positive (non-degenerate Kirchhoff coefficient), got {m0}"
            )));
        }
        if !(m1.is_finite() && m1 >= 0.0) {
            return Err(Error::invalid(format!("m1 must be nonnegative, got {m1}")));
        }
        if !alpha.is_finite() || !beta.is_finite() || alpha == 0.0 || beta == 0.0 {
            return Err(Error::invalid(format!(
                "alpha and beta must be finite and nonzero, got alpha = {alpha}, beta = {beta}"
            )));
        }
        if alpha.signum() != beta.signum() {
            return Err(Error::invalid(format!(
                "alpha and beta must have the same sign, got alpha = {alpha}, beta = {beta}"
            )));
        }
        Ok(Self {
            m0,
            m1,
            alpha,
            beta,
        })
    }

    pub fn m0(&self) -> f64 {
        self.m0
    }

    pub fn m1(&self) -> f64 {
        self.m1
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `alpha / beta`, always positive.
    pub fn coupling_ratio(&self) -> f64 {
        self.alpha / self.beta
    }

    /// `m1 == 0`: the system is linear and [`linear_system_matrix`] is exact.
    pub fn is_linear(&self) -> bool {
        self.m1 == 0.0
    }

    /// Copy with the given Kirchhoff nonlinearity.
    pub fn with_m1(self, m1: f64) -> Result<Self> {
        Self::new(self.m0, m1, self.alpha, self.beta)
    }

    /// Copy with both couplings replaced.
    pub fn with_coupling(self, alpha: f64, beta: f64) -> Result<Self> {
        Self::new(self.m0, self.m1, alpha, beta)
    }
}

/// Galerkin coefficients at one instant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModalState {
    pub t: f64,
    /// displacement
    pub h: Vec<f64>,
    /// velocity
    pub v: Vec<f64>,
    /// temperature
    pub c: Vec<f64>,
}

impl ModalState {
    pub fn zeros(n: usize) -> Self {
        Self {
            t: 0.0,
            h: vec![0.0; n],
            v: vec![0.0; n],
            c: vec![0.0; n],
        }
    }

    pub fn new(h: Vec<f64>, v: Vec<f64>, c: Vec<f64>) -> Result<Self> {
        let s = Self { t: 0.0, h, v, c };
        s.check_shape(s.h.len())?;
        Ok(s)
    }

    pub fn n_modes(&self) -> usize {
        self.h.len()
    }

    pub fn check_shape(&self, n: usize) -> Result<()> {
        if self.h.len() != n || self.v.len() != n || self.c.len() != n {
            return Err(Error::invalid(format!(
                "state has lengths (h {}, v {}, c {}), basis has {n} modes",
                self.h.len(),
                self.v.len(),
                self.c.len()
            )));
        }
        Ok(())
    }

    pub fn is_finite(&self) -> bool {
        self.h
            .iter()
            .chain(&self.v)
            .chain(&self.c)
            .all(|x| x.is_finite())
    }

    /// Largest absolute coefficient.
    pub fn max_abs(&self) -> f64 {
        self.h
            .iter()
            .chain(&self.v)
            .chain(&self.c)
            .fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn scaled(&self, sigma: f64) -> Self {
        let s = |x: &Vec<f64>| x.iter().map(|v| sigma * v).collect();
        Self {
            t: self.t,
            h: s(&self.h),
            v: s(&self.v),
            c: s(&self.c),
        }
    }

    /// `(self + other) / 2`, keeping `self.t`.
    pub fn midpoint(&self, other: &Self) -> Self {
        let m = |a: &Vec<f64>, b: &Vec<f64>| a.iter().zip(b).map(|(x, y)| 0.5 * (x + y)).collect();
        Self {
            t: 0.5 * (self.t + other.t),
            h: m(&self.h, &other.h),
            v: m(&self.v, &other.v),
            c: m(&self.c, &other.c),
        }
    }
}

/// Time derivative of a [`ModalState`].
#[derive(Debug, Clone, PartialEq)]
pub struct StateRate {
    pub dh: Vec<f64>,
    pub dv: Vec<f64>,
    pub dc: Vec<f64>,
}

/// `phi(s) = m0 + m1 s`.
pub fn kirchhoff_coefficient(params: &ModelParams, s: f64) -> Result<f64> {
    if s < 0.0 || s.is_nan() {
        return Err(Error::invalid(format!(
            "Kirchhoff coefficient needs a nonnegative argument, got {s}"
        )));
    }
    Ok(params.m0 + params.m1 * s)
}

/// `sum_k lambda_k h_k^2`, the modal form of the squared gradient norm.
pub fn grad_norm_sq(basis: &EigenBasis, h: &[f64]) -> Result<f64> {
    if h.len() != basis.n_modes() {
        return Err(Error::invalid(format!(
            "expected {} displacement coefficients, got {}",
            basis.n_modes(),
            h.len()
        )));
    }
    Ok(weighted_sq(basis.lambdas(), h))
}

pub(crate) fn weighted_sq(weights: &[f64], x: &[f64]) -> f64 {
    weights.iter().zip(x).map(|(w, x)| w * x * x).sum()
}

/// Right-hand side of the Galerkin ODE system.
pub fn rhs(params: &ModelParams, basis: &EigenBasis, state: &ModalState) -> Result<StateRate> {
    state.check_shape(basis.n_modes())?;
    if !state.is_finite() {
        return Err(Error::NumericFault {
            t: state.t,
            what: "non-finite state entry".into(),
        });
    }
    let s = weighted_sq(basis.lambdas(), &state.h);
    let phi = params.m0 + params.m1 * s;
    let lam = basis.lambdas();
    let dh = state.v.clone();
    let dv = (0..lam.len())
        .map(|k| -phi * lam[k] * state.h[k] + params.alpha * lam[k] * state.c[k])
        .collect();
    let dc = (0..lam.len())
        .map(|k| -lam[k] * state.c[k] - params.beta * lam[k] * state.v[k])
        .collect();
    Ok(StateRate { dh, dv, dc })
}

/// Single-mode system matrix of `d/dt (h, v, c)` for a linear (`m1 = 0`)
/// model at eigenvalue `lambda`.
pub fn linear_system_matrix(params: &ModelParams, lambda: f64) -> Result<[[f64; 3]; 3]> {
    if !params.is_linear() {
        return Err(Error::invalid(format!(
            "the single-mode matrix is exact only for m1 = 0, got m1 = {}",
            params.m1
        )));
    }
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::invalid(format!(
            "lambda must be positive, got {lambda}"
        )));
    }
    Ok(mode_matrix(params, params.m0, lambda))
}

/// `[0, 1, 0; -phi lambda, 0, alpha lambda; 0, -beta lambda, -lambda]`.
pub(crate) fn mode_matrix(params: &ModelParams, phi: f64, lambda: f64) -> [[f64; 3]; 3] {
    [
        [0.0, 1.0, 0.0],
        [-phi * lambda, 0.0, params.alpha * lambda],
        [0.0, -params.beta * lambda, -lambda],
    ]
}
