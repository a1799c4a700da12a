use serde::{Deserialize, Serialize};

use super::EnergyRecord;
use crate::error::{Error, Result};

/// Records with `E <= DEFAULT_FLOOR * E(0)` are excluded from fits.
pub const DEFAULT_FLOOR: f64 = 1e-12;

const MIN_FIT_POINTS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitWindow {
    pub t_lo: f64,
    pub t_hi: f64,
}

impl FitWindow {
    pub fn new(t_lo: f64, t_hi: f64) -> Self {
        Self { t_lo, t_hi }
    }

    /// `[lo * t_end, hi * t_end]`.
    pub fn fractions(t_end: f64, lo: f64, hi: f64) -> Self {
        Self::new(lo * t_end, hi * t_end)
    }

    /// The default window `[0.2 T, 0.8 T]`, skipping the initial transient.
    pub fn default_for(t_end: f64) -> Self {
        Self::fractions(t_end, 0.2, 0.8)
    }

    fn contains(&self, t: f64) -> bool {
        let slack = 1e-12 * self.t_hi.abs().max(1.0);
        t >= self.t_lo - slack && t <= self.t_hi + slack
    }
}

/// Least-squares fit of `log E = log(C E(0)) - omega t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub c: f64,
    pub omega: f64,
    pub r_squared: f64,
    pub window: FitWindow,
    pub points: usize,
    /// `false` when the fitted slope is not negative ("no decay").
    pub decaying: bool,
}

pub fn fit_exponential_decay(records: &[EnergyRecord], window: FitWindow) -> Result<DecayFit> {
    let e0 = records
        .first()
        .ok_or_else(|| Error::invalid("decay fit needs records"))?
        .energy;
    let t: Vec<f64> = records.iter().map(|r| r.t).collect();
    let e: Vec<f64> = records.iter().map(|r| r.energy).collect();
    fit_log_linear(&t, &e, e0, window, DEFAULT_FLOOR)
}

/// Fit on raw samples; `e0` normalizes the prefactor.
pub fn fit_log_linear(
    times: &[f64],
    energies: &[f64],
    e0: f64,
    window: FitWindow,
    floor: f64,
) -> Result<DecayFit> {
    if times.len() != energies.len() {
        return Err(Error::invalid("times and energies differ in length"));
    }
    if !(e0 > 0.0) {
        return Err(Error::invalid(format!(
            "decay fit needs a positive initial energy, got {e0}"
        )));
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = times
        .iter()
        .zip(energies)
        .filter(|(&t, &e)| window.contains(t) && e > floor * e0)
        .map(|(&t, &e)| (t, e.ln()))
        .unzip();
    let n = xs.len();
    if n < MIN_FIT_POINTS {
        return Err(Error::invalid(format!(
            "decay fit needs at least {MIN_FIT_POINTS} records above the floor in [{}, {}], got {n}",
            window.t_lo, window.t_hi
        )));
    }
    let nf = n as f64;
    let xm = xs.iter().sum::<f64>() / nf;
    let ym = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - xm) * (x - xm)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - xm) * (y - ym)).sum();
    let syy: f64 = ys.iter().map(|y| (y - ym) * (y - ym)).sum();
    if sxx == 0.0 {
        return Err(Error::invalid("decay fit window contains a single time"));
    }
    // log-constant data up to round-off: exact zero slope
    let flat = syy <= 1e-28 * nf * (1.0 + ym * ym);
    let slope = if flat { 0.0 } else { sxy / sxx };
    let intercept = ym - slope * xm;
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum();
    let r_squared = if !flat {
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    } else {
        1.0
    };
    let omega = if slope == 0.0 { 0.0 } else { -slope };
    Ok(DecayFit {
        c: intercept.exp() / e0,
        omega,
        r_squared,
        window,
        points: n,
        decaying: omega > 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn grid(n: usize, t_end: f64) -> Vec<f64> {
        (0..n).map(|i| t_end * i as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn exact_exponential() {
        let t = grid(101, 10.0);
        let e: Vec<f64> = t.iter().map(|t| 5.0 * (-0.3 * t).exp()).collect();
        let fit = fit_log_linear(&t, &e, 5.0, FitWindow::new(0.0, 10.0), DEFAULT_FLOOR).unwrap();
        assert!((fit.c - 1.0).abs() < 1e-12);
        assert!((fit.omega - 0.3).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
        assert!(fit.decaying);
    }

    #[test]
    fn constant_energy_means_no_decay() {
        let t = grid(50, 5.0);
        let e = vec![2.0; 50];
        let fit = fit_log_linear(&t, &e, 2.0, FitWindow::new(0.0, 5.0), DEFAULT_FLOOR).unwrap();
        assert_eq!(fit.omega, 0.0);
        assert!(!fit.decaying);
    }

    #[test]
    fn too_few_points() {
        let t = grid(9, 1.0);
        let e = vec![1.0; 9];
        assert!(fit_log_linear(&t, &e, 1.0, FitWindow::new(0.0, 1.0), DEFAULT_FLOOR).is_err());
        // floor removes numerically-zero tail
        let t = grid(30, 1.0);
        let mut e = vec![1e-20; 30];
        e[0] = 1.0;
        assert!(fit_log_linear(&t, &e, 1.0, FitWindow::new(0.0, 1.0), DEFAULT_FLOOR).is_err());
    }

    proptest! {
        #[test]
        fn recovers_exponential_parameters(c in 0.1..10.0f64, omega in 0.01..2.0f64, e0 in 0.1..10.0f64) {
            let t = grid(200, 20.0);
            let e: Vec<f64> = t.iter().map(|t| c * e0 * (-omega * t).exp()).collect();
            let fit = fit_log_linear(&t, &e, e0, FitWindow::default_for(20.0), DEFAULT_FLOOR).unwrap();
            prop_assert!((fit.omega - omega).abs() < 1e-10);
            prop_assert!((fit.c - c).abs() < 1e-10 * c);
        }
    }
}
