//! Dirichlet-Laplacian eigenbases on intervals and rectangles.
//!
//! Eigenfunctions are the L2-normalized sines
//! `e_k(x) = sqrt(2/L) sin(k pi x / L)` on `(0, L)` and their tensor
//! products on `(0, Lx) x (0, Ly)`, with `-Laplace e_k = lambda_k e_k`.
//! Modes are ordered by ascending eigenvalue; degenerate eigenvalues are
//! ordered lexicographically by mode index.

mod quadrature;

pub use quadrature::{gauss_legendre, LineRule, QuadratureConfig};

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Spatial domain with closed-form Dirichlet eigenpairs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Domain {
    Interval { length: f64 },
    Rectangle { lx: f64, ly: f64 },
}

impl Domain {
    pub fn interval(length: f64) -> Result<Self> {
        let d = Domain::Interval { length };
        d.validate()?;
        Ok(d)
    }

    pub fn rectangle(lx: f64, ly: f64) -> Result<Self> {
        let d = Domain::Rectangle { lx, ly };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |l: f64| l.is_finite() && l > 0.0;
        match *self {
            Domain::Interval { length } if !ok(length) => Err(Error::invalid(format!(
                "interval length must be positive and finite, got {length}"
            ))),
            Domain::Rectangle { lx, ly } if !ok(lx) || !ok(ly) => Err(Error::invalid(format!(
                "rectangle side lengths must be positive and finite, got ({lx}, {ly})"
            ))),
            _ => Ok(()),
        }
    }

    pub fn dimension(&self) -> usize {
        match self {
            Domain::Interval { .. } => 1,
            Domain::Rectangle { .. } => 2,
        }
    }

    /// Whether `p` lies in the closure of the domain, up to a relative slack
    /// of `1e-12` of the side length.
    pub fn contains(&self, p: Point) -> bool {
        let inside = |v: f64, l: f64| {
            let slack = 1e-12 * l;
            v >= -slack && v <= l + slack
        };
        match *self {
            Domain::Interval { length } => inside(p.x, length),
            Domain::Rectangle { lx, ly } => inside(p.x, lx) && inside(p.y, ly),
        }
    }
}

/// A point of the domain. On an interval only `x` is used.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn on_line(x: f64) -> Self {
        Self { x, y: 0.0 }
    }
}

/// Integer label of an eigenfunction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ModeIndex {
    Line(usize),
    Plane(usize, usize),
}

/// The first `n_modes` Dirichlet eigenpairs of a domain.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenBasis {
    domain: Domain,
    lambdas: Vec<f64>,
    modes: Vec<ModeIndex>,
    quadrature: QuadratureConfig,
}

/// Build the eigenbasis with the default quadrature configuration.
pub fn build_basis(domain: Domain, n_modes: usize) -> Result<EigenBasis> {
    EigenBasis::new(domain, n_modes, QuadratureConfig::default())
}

impl EigenBasis {
    pub fn new(domain: Domain, n_modes: usize, quadrature: QuadratureConfig) -> Result<Self> {
        domain.validate()?;
        if n_modes == 0 {
            return Err(Error::invalid("n_modes must be at least 1"));
        }
        if quadrature.panels_per_pi == 0 || quadrature.order == 0 {
            return Err(Error::invalid(
                "quadrature panels and order must be positive",
            ));
        }
        let mut pairs: Vec<(f64, ModeIndex)> = match domain {
            Domain::Interval { length } => (1..=n_modes)
                .map(|k| ((k as f64 * PI / length).powi(2), ModeIndex::Line(k)))
                .collect(),
            Domain::Rectangle { lx, ly } => {
                // The n smallest eigenvalues all have j <= n and k <= n.
                let mut v = Vec::with_capacity(n_modes * n_modes);
                for j in 1..=n_modes {
                    for k in 1..=n_modes {
                        let lam = (j as f64 * PI / lx).powi(2) + (k as f64 * PI / ly).powi(2);
                        v.push((lam, ModeIndex::Plane(j, k)));
                    }
                }
                v
            }
        };
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        pairs.truncate(n_modes);
        let (lambdas, modes) = pairs.into_iter().unzip();
        Ok(Self {
            domain,
            lambdas,
            modes,
            quadrature,
        })
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn n_modes(&self) -> usize {
        self.lambdas.len()
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn modes(&self) -> &[ModeIndex] {
        &self.modes
    }

    pub fn lambda_max(&self) -> f64 {
        *self.lambdas.last().expect("basis is never empty")
    }

    pub fn quadrature(&self) -> QuadratureConfig {
        self.quadrature
    }

    /// Value of the `k`-th (0-based) orthonormal eigenfunction at `p`.
    pub fn eigenfunction(&self, k: usize, p: Point) -> f64 {
        match (self.domain, self.modes[k]) {
            (Domain::Interval { length }, ModeIndex::Line(j)) => {
                (2.0 / length).sqrt() * (j as f64 * PI * p.x / length).sin()
            }
            (Domain::Rectangle { lx, ly }, ModeIndex::Plane(j, m)) => {
                2.0 / (lx * ly).sqrt()
                    * (j as f64 * PI * p.x / lx).sin()
                    * (m as f64 * PI * p.y / ly).sin()
            }
            _ => unreachable!("mode index kind always matches the domain"),
        }
    }

    fn max_wavenumbers(&self) -> (usize, usize) {
        self.modes.iter().fold((1, 1), |(a, b), m| match *m {
            ModeIndex::Line(j) => (a.max(j), b),
            ModeIndex::Plane(j, k) => (a.max(j), b.max(k)),
        })
    }

    /// Tensor (or line) quadrature nodes and weights resolving every basis
    /// product exactly up to round-off.
    pub fn quadrature_points(&self) -> (Vec<Point>, Vec<f64>) {
        let (kx, ky) = self.max_wavenumbers();
        match self.domain {
            Domain::Interval { length } => {
                let r = LineRule::composite(length, kx, self.quadrature);
                (
                    r.nodes.iter().map(|&x| Point::on_line(x)).collect(),
                    r.weights,
                )
            }
            Domain::Rectangle { lx, ly } => {
                let rx = LineRule::composite(lx, kx, self.quadrature);
                let ry = LineRule::composite(ly, ky, self.quadrature);
                let mut pts = Vec::with_capacity(rx.nodes.len() * ry.nodes.len());
                let mut wts = Vec::with_capacity(pts.capacity());
                for (&x, &wx) in rx.nodes.iter().zip(&rx.weights) {
                    for (&y, &wy) in ry.nodes.iter().zip(&ry.weights) {
                        pts.push(Point::new(x, y));
                        wts.push(wx * wy);
                    }
                }
                (pts, wts)
            }
        }
    }
}

/// Uniformly sampled field including the boundary: `nx` samples along `x`
/// (and `ny` along `y` on a rectangle, row-major in `y`). On an interval
/// `ny` is 1.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledField {
    pub values: Vec<f64>,
    pub nx: usize,
    pub ny: usize,
}

/// Initial data handed to [`project_initial_data`].
pub enum Field<'a> {
    /// Closed-form function of position.
    Function(&'a dyn Fn(Point) -> f64),
    /// Uniform samples, integrated with composite Simpson.
    Sampled(&'a SampledField),
    /// A finite sine combination given by its coefficients; projected exactly.
    Modal(&'a [f64]),
}

/// `<field, e_k>` for every basis mode.
pub fn project_initial_data(basis: &EigenBasis, field: &Field<'_>) -> Result<Vec<f64>> {
    match field {
        Field::Function(f) => {
            let (pts, wts) = basis.quadrature_points();
            let vals: Vec<f64> = pts.iter().map(|&p| f(p)).collect();
            if vals.iter().any(|v| !v.is_finite()) {
                return Err(Error::invalid("field is not finite at a quadrature node"));
            }
            Ok((0..basis.n_modes())
                .map(|k| {
                    pts.iter()
                        .zip(&wts)
                        .zip(&vals)
                        .map(|((&p, &w), &v)| w * v * basis.eigenfunction(k, p))
                        .sum()
                })
                .collect())
        }
        Field::Sampled(s) => project_samples(basis, s),
        Field::Modal(c) => {
            let mut out = vec![0.0; basis.n_modes()];
            for (o, &v) in out.iter_mut().zip(c.iter()) {
                *o = v;
            }
            Ok(out)
        }
    }
}

fn simpson_weights(n: usize, length: f64) -> Vec<f64> {
    let h = length / (n - 1) as f64;
    (0..n)
        .map(|i| {
            let c = if i == 0 || i == n - 1 {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            c * h / 3.0
        })
        .collect()
}

fn project_samples(basis: &EigenBasis, s: &SampledField) -> Result<Vec<f64>> {
    let (kx, ky) = basis.max_wavenumbers();
    let check_axis = |n: usize, k: usize, axis: &str| -> Result<()> {
        if n < 3 || n % 2 == 0 {
            return Err(Error::invalid(format!(
                "sample count along {axis} must be odd and at least 3 for Simpson's rule, got {n}"
            )));
        }
        if n - 1 < 4 * k {
            return Err(Error::invalid(format!(
                "{n} samples along {axis} cannot resolve wavenumber {k}; need at least {}",
                4 * k + 1
            )));
        }
        Ok(())
    };
    if s.values.len() != s.nx * s.ny {
        return Err(Error::invalid(format!(
            "sample buffer has {} values, grid is {} x {}",
            s.values.len(),
            s.nx,
            s.ny
        )));
    }
    let (points, weights): (Vec<Point>, Vec<f64>) = match basis.domain {
        Domain::Interval { length } => {
            if s.ny != 1 {
                return Err(Error::invalid("interval samples must have ny = 1"));
            }
            check_axis(s.nx, kx, "x")?;
            let h = length / (s.nx - 1) as f64;
            (
                (0..s.nx).map(|i| Point::on_line(i as f64 * h)).collect(),
                simpson_weights(s.nx, length),
            )
        }
        Domain::Rectangle { lx, ly } => {
            check_axis(s.nx, kx, "x")?;
            check_axis(s.ny, ky, "y")?;
            let wx = simpson_weights(s.nx, lx);
            let wy = simpson_weights(s.ny, ly);
            let hx = lx / (s.nx - 1) as f64;
            let hy = ly / (s.ny - 1) as f64;
            let mut pts = Vec::with_capacity(s.nx * s.ny);
            let mut wts = Vec::with_capacity(s.nx * s.ny);
            for i in 0..s.nx {
                for j in 0..s.ny {
                    pts.push(Point::new(i as f64 * hx, j as f64 * hy));
                    wts.push(wx[i] * wy[j]);
                }
            }
            (pts, wts)
        }
    };
    Ok((0..basis.n_modes())
        .map(|k| {
            points
                .iter()
                .zip(&weights)
                .zip(&s.values)
                .map(|((&p, &w), &v)| w * v * basis.eigenfunction(k, p))
                .sum()
        })
        .collect())
}

/// Reconstruct `sum_k coeffs_k e_k(p)` at each point.
pub fn evaluate_field(basis: &EigenBasis, coeffs: &[f64], points: &[Point]) -> Result<Vec<f64>> {
    if coeffs.len() != basis.n_modes() {
        return Err(Error::invalid(format!(
            "expected {} coefficients, got {}",
            basis.n_modes(),
            coeffs.len()
        )));
    }
    points
        .iter()
        .map(|&p| {
            if !basis.domain.contains(p) {
                return Err(Error::invalid(format!(
                    "point ({}, {}) lies outside the domain",
                    p.x, p.y
                )));
            }
            Ok(coeffs
                .iter()
                .enumerate()
                .map(|(k, &c)| c * basis.eigenfunction(k, p))
                .sum())
        })
        .collect()
}

/// Gram matrix of the eigenfunctions under the basis quadrature.
pub fn gram_matrix(basis: &EigenBasis) -> Vec<Vec<f64>> {
    let (pts, wts) = basis.quadrature_points();
    let n = basis.n_modes();
    let table: Vec<Vec<f64>> = (0..n)
        .map(|k| pts.iter().map(|&p| basis.eigenfunction(k, p)).collect())
        .collect();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    wts.iter()
                        .zip(&table[i])
                        .zip(&table[j])
                        .map(|((w, a), b)| w * a * b)
                        .sum()
                })
                .collect()
        })
        .collect()
}
