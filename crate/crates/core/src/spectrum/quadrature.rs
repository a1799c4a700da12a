//! Composite Gauss-Legendre rules on `[0, L]`.

use std::f64::consts::PI;

/// Nodes and weights of the `order`-point Gauss-Legendre rule on `[-1, 1]`.
///
/// Roots of `P_n` are found by Newton iteration from the Chebyshev-like
/// initial guess `cos(pi (i + 3/4) / (n + 1/2))`; the weights follow from
/// `P_n'` at the converged root.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(order >= 1, "Gauss-Legendre order must be positive");
    let n = order;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                dp = legendre_with_derivative(n, z).1;
                break;
            }
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// Configuration of the composite rule used for projections.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct QuadratureConfig {
    /// Panels per length `pi`; the effective count is raised when the basis
    /// contains wavenumbers the panels cannot resolve.
    pub panels_per_pi: usize,
    /// Gauss points per panel.
    pub order: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            panels_per_pi: 8,
            order: 10,
        }
    }
}

/// A one-dimensional composite rule on `[0, length]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LineRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl LineRule {
    /// Build a composite rule on `[0, length]` resolving sines up to
    /// wavenumber `max_wavenumber` (i.e. `sin(k pi x / length)`, `k <= max`).
    pub fn composite(length: f64, max_wavenumber: usize, config: QuadratureConfig) -> Self {
        let by_length = (config.panels_per_pi as f64 * length / PI).ceil() as usize;
        // Products of two basis sines oscillate with wavenumber up to 2 * kmax,
        // i.e. kmax full periods; two panels per period keeps a 10-point
        // rule at round-off.
        let panels = by_length.max(2 * max_wavenumber).max(1);
        let (ref_nodes, ref_weights) = gauss_legendre(config.order.max(1));
        let h = length / panels as f64;
        let mut nodes = Vec::with_capacity(panels * ref_nodes.len());
        let mut weights = Vec::with_capacity(panels * ref_nodes.len());
        for p in 0..panels {
            let a = p as f64 * h;
            for (z, w) in ref_nodes.iter().zip(&ref_weights) {
                nodes.push(a + 0.5 * h * (z + 1.0));
                weights.push(0.5 * h * w);
            }
        }
        Self { nodes, weights }
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_rule_is_exact_for_degree_2n_minus_1() {
        for order in 1..=12 {
            let (x, w) = gauss_legendre(order);
            for deg in 0..(2 * order) {
                let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
                let exact = if deg % 2 == 1 {
                    0.0
                } else {
                    2.0 / (deg as f64 + 1.0)
                };
                assert!(
                    (q - exact).abs() < 1e-13,
                    "order {order} deg {deg}: {q} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn composite_rule_integrates_smooth_functions() {
        let rule = LineRule::composite(PI, 4, QuadratureConfig::default());
        let val = rule.integrate(|x| x.sin());
        assert!((val - 2.0).abs() < 1e-14);
        let rule = LineRule::composite(2.5, 1, QuadratureConfig::default());
        let val = rule.integrate(|x| (-x).exp());
        assert!((val - (1.0 - (-2.5f64).exp())).abs() < 1e-14);
    }
}
