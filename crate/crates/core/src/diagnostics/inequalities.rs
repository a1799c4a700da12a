//! Numerical checkers for the nonlinear Gronwall inequality and the
//! Martinez/Komornik integral decay criterion.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const REL_TOL: f64 = 1e-9;

fn check_grid(times: &[f64]) -> Result<()> {
    if times.len() < 2 {
        return Err(Error::invalid("need at least two samples"));
    }
    let h = times[1] - times[0];
    if !(h > 0.0) {
        return Err(Error::invalid("sample times must increase"));
    }
    let span = times[times.len() - 1] - times[0];
    for w in times.windows(2) {
        if ((w[1] - w[0]) - h).abs() > 1e-9 * span.max(h) {
            return Err(Error::invalid("sample times must be uniformly spaced"));
        }
    }
    Ok(())
}

/// Running trapezoid integral `int_{t_0}^{t_i} f`.
fn cumulative_trapezoid(times: &[f64], f: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(f.len());
    let mut acc = 0.0;
    out.push(0.0);
    for i in 1..f.len() {
        acc += 0.5 * (times[i] - times[i - 1]) * (f[i] + f[i - 1]);
        out.push(acc);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GronwallReport {
    /// `B(t_i) = (K^-r - r int_0^t f)^(-1/r)`; `f64::INFINITY` past blow-up.
    pub bound: Vec<f64>,
    /// First time where `K^-r - r int f` reaches 0, linearly interpolated
    /// between samples.
    pub blowup_time: Option<f64>,
    /// `G <= K + int f G^(r+1)` on the samples.
    pub hypothesis_holds: bool,
    /// `G <= B` on every sample before blow-up (and the hypothesis holds).
    pub holds: bool,
}

/// Checks `G(t) <= K + int_0^t f G^(r+1)` and the implied
/// `G(t) <= (K^-r - r int_0^t f)^(-1/r)` on a uniform grid.
pub fn check_modified_gronwall(
    times: &[f64],
    g: &[f64],
    f: &[f64],
    k: f64,
    r: f64,
) -> Result<GronwallReport> {
    check_grid(times)?;
    if g.len() != times.len() || f.len() != times.len() {
        return Err(Error::invalid(
            "G, f and the time grid must have equal lengths",
        ));
    }
    if !(k > 0.0) || !(r > 0.0) {
        return Err(Error::invalid(format!(
            "need K > 0 and r > 0, got K = {k}, r = {r}"
        )));
    }
    if g.iter().chain(f).any(|&x| !(x >= 0.0)) {
        return Err(Error::invalid("G and f samples must be nonnegative"));
    }
    let int_f = cumulative_trapezoid(times, f);
    let base: Vec<f64> = int_f.iter().map(|i| k.powf(-r) - r * i).collect();

    let mut blowup_time = None;
    for i in 0..base.len() {
        if base[i] <= 0.0 {
            blowup_time = Some(if i == 0 {
                times[0]
            } else {
                let (b0, b1) = (base[i - 1], base[i]);
                times[i - 1] + (times[i] - times[i - 1]) * b0 / (b0 - b1)
            });
            break;
        }
    }
    let bound: Vec<f64> = base
        .iter()
        .map(|&b| {
            if b > 0.0 {
                b.powf(-1.0 / r)
            } else {
                f64::INFINITY
            }
        })
        .collect();

    let fg: Vec<f64> = f.iter().zip(g).map(|(f, g)| f * g.powf(r + 1.0)).collect();
    let int_fg = cumulative_trapezoid(times, &fg);
    let hypothesis_holds = g
        .iter()
        .zip(&int_fg)
        .all(|(g, i)| *g <= (k + i) * (1.0 + REL_TOL));
    let below = g
        .iter()
        .zip(&bound)
        .filter(|(_, b)| b.is_finite())
        .all(|(g, b)| *g <= b * (1.0 + REL_TOL));
    Ok(GronwallReport {
        bound,
        blowup_time,
        hypothesis_holds,
        holds: hypothesis_holds && below,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MartinezReport {
    /// `max_t int_t^T E^(mu+1) / (E(0)^mu E(t))`.
    pub omega_est: f64,
    /// `E(T) / E(0)`.
    pub tail_ratio: f64,
    /// `E(T) <= 1e-6 E(0)`, so the truncated tail stands in for the true one.
    pub tail_ok: bool,
    /// The integral hypothesis is usable: small tail and finite positive
    /// `omega_est`.
    pub hypothesis_holds: bool,
    /// The decay envelope dominates every sample.
    pub bound_holds: bool,
    pub envelope: Vec<f64>,
}

/// Estimate the constant of the integral decay criterion from samples of a
/// nonincreasing energy and test the implied envelope
/// `E(0) exp(1 - t/omega)` (`mu = 0`) or
/// `E(0) ((1 + mu) / (1 + mu t / omega))^(1/mu)` (`mu > 0`).
pub fn check_martinez(times: &[f64], e: &[f64], mu: f64) -> Result<MartinezReport> {
    check_grid(times)?;
    if e.len() != times.len() {
        return Err(Error::invalid(
            "energy samples and time grid differ in length",
        ));
    }
    if !(mu >= 0.0) {
        return Err(Error::invalid(format!("mu must be nonnegative, got {mu}")));
    }
    let e0 = e[0];
    if !(e0 > 0.0) || e.iter().any(|&x| !(x >= 0.0)) {
        return Err(Error::invalid(
            "energy samples must be nonnegative with E(0) > 0",
        ));
    }
    if e.windows(2).any(|w| w[1] - w[0] > REL_TOL * e0) {
        return Err(Error::invalid(
            "energy samples increase; the criterion needs a nonincreasing energy",
        ));
    }
    let t0 = times[0];
    // tail integrals int_{t_i}^T E^(mu+1), by trapezoid from the right
    let p: Vec<f64> = e.iter().map(|x| x.powf(mu + 1.0)).collect();
    let mut tail = vec![0.0; e.len()];
    for i in (0..e.len() - 1).rev() {
        tail[i] = tail[i + 1] + 0.5 * (times[i + 1] - times[i]) * (p[i] + p[i + 1]);
    }
    let omega_est = e
        .iter()
        .zip(&tail)
        .filter(|(x, _)| **x > 0.0)
        .map(|(x, tl)| tl / (e0.powf(mu) * x))
        .fold(0.0, f64::max);
    let tail_ratio = e[e.len() - 1] / e0;
    let tail_ok = tail_ratio <= 1e-6;
    let envelope: Vec<f64> = times
        .iter()
        .map(|&t| {
            let s = t - t0;
            if omega_est <= 0.0 {
                f64::INFINITY
            } else if mu == 0.0 {
                e0 * (1.0 - s / omega_est).exp()
            } else {
                e0 * ((1.0 + mu) / (1.0 + mu * s / omega_est)).powf(1.0 / mu)
            }
        })
        .collect();
    let bound_holds = e
        .iter()
        .zip(&envelope)
        .all(|(x, env)| *x <= env * (1.0 + REL_TOL));
    Ok(MartinezReport {
        omega_est,
        tail_ratio,
        tail_ok,
        hypothesis_holds: tail_ok && omega_est.is_finite() && omega_est > 0.0,
        bound_holds,
        envelope,
    })
}
