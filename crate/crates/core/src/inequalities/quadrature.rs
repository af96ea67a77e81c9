//! Gauss–Legendre quadrature and the interpolation densities `β₀`, `β_θ`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{arg_err, Result};

/// `β₀(t) = π / (2(cosh πt + 1))`, a probability density on ℝ.
pub fn beta0_density(t: f64) -> f64 {
    // Written with sech² to stay finite for large |t|.
    let s = 1.0 / (PI * t / 2.0).cosh();
    PI / 4.0 * s * s
}

/// Antiderivative `½ tanh(πt/2)` of `β₀`.
pub fn beta0_antiderivative(t: f64) -> f64 {
    0.5 * (PI * t / 2.0).tanh()
}

/// Mass of `β₀` outside `[−T, T]`: `1 − tanh(πT/2)`.
pub fn beta0_tail_mass(t: f64) -> f64 {
    // 1 − tanh(x) = 2e^{−2x}/(1 + e^{−2x}), without cancellation.
    let e = (-PI * t).exp();
    2.0 * e / (1.0 + e)
}

/// `β_θ(t) = sin(πθ) / (2θ(cosh πt + cos πθ))` for `θ ∈ (0, 1]`. At `θ = 1`
/// the density collapses to a point mass at 0; this returns 0 for `t ≠ 0`
/// and `+∞` at `t = 0`.
pub fn beta_density(theta: f64, t: f64) -> Result<f64> {
    if !(theta > 0.0 && theta <= 1.0) {
        return arg_err(format!("β_θ needs θ in (0, 1], got {theta}"));
    }
    if theta == 1.0 {
        return Ok(if t == 0.0 { f64::INFINITY } else { 0.0 });
    }
    let num = (PI * theta).sin();
    let den = 2.0 * theta * ((PI * t).cosh() + (PI * theta).cos());
    Ok(num / den)
}

/// Gauss–Legendre rule on `[−1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes by Newton iteration on `P_n` from the Chebyshev guesses,
    /// weights `2 / ((1 − x²) P_n'(x)²)`.
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return arg_err("Gauss–Legendre rule needs at least one node");
        }
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d.is_finite() {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Ok(Self { nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped to `[a, b]`, ascending.
    pub fn on_interval(&self, a: f64, b: f64) -> Vec<(f64, f64)> {
        let (mid, half) = ((a + b) / 2.0, (b - a) / 2.0);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| (mid + half * x, half * w))
            .collect()
    }

    pub fn integrate(&self, a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
        self.on_interval(a, b).iter().map(|&(x, w)| w * f(x)).sum()
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Truncated quadrature over `[−T, T]` for `β₀`-weighted integrals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureSpec {
    /// Half-width `T` of the integration window.
    pub truncation: f64,
    /// Number of Gauss–Legendre nodes (at least 16).
    pub node_count: usize,
    /// Largest acceptable truncation error bound relative to the value; a
    /// larger bound is a quadrature error. The bound is always added to the
    /// comparison slack, so this only rejects windows too short to say
    /// anything. The bound uses `f` at the product of the largest
    /// eigenvalues and is loose by a few orders of magnitude for `exp`.
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
}

fn default_tolerance() -> f64 {
    1e-3
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            truncation: 6.0,
            node_count: 256,
            tolerance: default_tolerance(),
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.truncation > 0.0 && self.truncation.is_finite()) {
            return arg_err(format!("truncation must be positive, got {}", self.truncation));
        }
        if self.node_count < 16 {
            return arg_err(format!("need at least 16 nodes, got {}", self.node_count));
        }
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return arg_err(format!("tolerance must be positive, got {}", self.tolerance));
        }
        Ok(())
    }

    pub fn rule(&self) -> Result<GaussLegendre> {
        self.validate()?;
        GaussLegendre::new(self.node_count)
    }

    /// `β₀` mass of the window as computed by the rule.
    pub fn beta0_mass(&self) -> Result<f64> {
        let t = self.truncation;
        Ok(self.rule()?.integrate(-t, t, beta0_density))
    }
}
