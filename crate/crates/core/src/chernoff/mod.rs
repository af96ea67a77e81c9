//! Tensor expander Chernoff bounds: the contraction constants `γ₁…γ₄`, the
//! exact transfer-operator expectation and its exponential bound, the
//! Gaussian domination of `β₀`, the tail bound minimized over `t`, its
//! closed form for the identity polynomial, and Monte Carlo tail estimates
//! that the bounds are compared against.

mod assignment;
mod bounds;
mod tail;
mod transfer;

use serde::{Deserialize, Serialize};

use crate::error::{arg_err, domain_err, Result};

pub use assignment::{AssignmentSpec, VertexTensorAssignment};
pub use bounds::{
    corollary_bound, corollary_t, default_sigma_grid, fit_gaussian_domination, theorem_bound, theorem_log_objective,
    DominationFit, TSearch, TheoremBound,
};
pub use tail::{empirical_tail, tail_sweep, walk_sum, TailEstimate};
pub use transfer::{
    contraction_certificate, expectation_bound, gamma_bounds, monte_carlo_trace, parallel_part, perpendicular_part,
    transfer_expectation, ContractionReport, GammaBounds, TransferOperator, TRANSFER_CAPACITY,
};

/// `f(x) = (a₀ + a₁x + ⋯ + a_n xⁿ)^s` with nonnegative coefficients, `s ≥ 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolynomialSpec {
    pub coefficients: Vec<f64>,
    #[serde(default = "one")]
    pub power: f64,
}

fn one() -> f64 {
    1.0
}

impl PolynomialSpec {
    pub fn new(coefficients: Vec<f64>, power: f64) -> Result<Self> {
        let p = Self { coefficients, power };
        p.validate()?;
        Ok(p)
    }

    pub fn identity() -> Self {
        Self {
            coefficients: vec![0.0, 1.0],
            power: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.coefficients.iter().any(|a| !(a.is_finite() && *a >= 0.0)) {
            return arg_err(format!("coefficients must be finite and nonnegative: {:?}", self.coefficients));
        }
        if !self.coefficients.iter().any(|&a| a > 0.0) {
            return arg_err("polynomial has no positive coefficient");
        }
        if !(self.power >= 1.0 && self.power.is_finite()) {
            return arg_err(format!("power must be at least 1, got {}", self.power));
        }
        Ok(())
    }

    /// Degree `n` (index of the last coefficient).
    pub fn degree(&self) -> usize {
        self.coefficients.len().saturating_sub(1)
    }

    /// Largest `l ≥ 1` with `a_l > 0`, if any.
    pub fn top_power(&self) -> Option<usize> {
        (1..self.coefficients.len()).rev().find(|&l| self.coefficients[l] > 0.0)
    }

    pub fn base(&self, x: f64) -> f64 {
        self.coefficients.iter().rev().fold(0.0, |acc, &a| acc * x + a)
    }

    /// `f(x)`. A fractional power of a negative base is a domain error.
    pub fn eval(&self, x: f64) -> Result<f64> {
        let p = self.base(x);
        if self.power.fract() == 0.0 && self.power <= i32::MAX as f64 {
            return Ok(p.powi(self.power as i32));
        }
        if p < 0.0 {
            return domain_err(format!("fractional power {} of negative value {p}", self.power));
        }
        Ok(p.powf(self.power))
    }
}

/// Parameters of the tail bound. `λ̄ = 1 − λ` where `λ` is the spectral
/// expansion; `λ̄ = 0` (bipartite graphs) is allowed because the bound's
/// formula stays finite there.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChernoffParams {
    pub kappa: usize,
    pub k: usize,
    pub theta: f64,
    pub lambda_bar: f64,
    pub dim: usize,
    pub radius: f64,
}

impl ChernoffParams {
    pub fn new(kappa: usize, k: usize, theta: f64, lambda_bar: f64, dim: usize, radius: f64) -> Result<Self> {
        let p = Self {
            kappa,
            k,
            theta,
            lambda_bar,
            dim,
            radius,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn for_assignment(assign: &VertexTensorAssignment, kappa: usize, k: usize, theta: f64) -> Result<Self> {
        let lambda = assign.graph().spectral_expansion()?;
        Self::new(kappa, k, theta, 1.0 - lambda, assign.dim(), assign.radius())
    }

    pub fn validate(&self) -> Result<()> {
        if self.kappa == 0 {
            return arg_err("κ must be at least 1");
        }
        if !(self.theta > 0.0 && self.theta.is_finite()) {
            return arg_err(format!("ϑ must be positive, got {}", self.theta));
        }
        if !(0.0..=1.0).contains(&self.lambda_bar) {
            return arg_err(format!("λ̄ must lie in [0, 1], got {}", self.lambda_bar));
        }
        if self.k == 0 || self.k > self.dim {
            return arg_err(format!("k = {} outside 1..={}", self.k, self.dim));
        }
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return arg_err(format!("radius must be positive, got {}", self.radius));
        }
        Ok(())
    }

    pub fn lambda(&self) -> f64 {
        1.0 - self.lambda_bar
    }

    pub fn with_theta(&self, theta: f64) -> Result<Self> {
        let mut p = *self;
        p.theta = theta;
        p.validate()?;
        Ok(p)
    }

    /// `k + √((𝕀₁ᴹ − k)/k)`.
    pub fn ky_fan_factor(&self) -> f64 {
        let k = self.k as f64;
        k + ((self.dim as f64 - k) / k).sqrt()
    }

    /// `κ + 8λ̄`.
    pub fn q(&self) -> f64 {
        self.kappa as f64 + 8.0 * self.lambda_bar
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_evaluation() {
        let p = PolynomialSpec::new(vec![1.0, 0.0, 2.0], 2.0).unwrap();
        assert_eq!(p.eval(3.0).unwrap(), 361.0);
        assert_eq!(p.degree(), 2);
        assert_eq!(p.top_power(), Some(2));
        let frac = PolynomialSpec::new(vec![0.0, 1.0], 1.5).unwrap();
        assert!(frac.eval(-1.0).is_err());
        assert!((frac.eval(4.0).unwrap() - 8.0).abs() < 1e-15);
        assert!(PolynomialSpec::new(vec![0.0, -1.0], 1.0).is_err());
        assert!(PolynomialSpec::new(vec![0.0], 1.0).is_err());
        assert!(PolynomialSpec::new(vec![1.0], 0.5).is_err());
    }

    #[test]
    fn params_validation() {
        assert!(ChernoffParams::new(4, 1, 1.0, 0.0, 4, 1.0).is_ok());
        assert!(ChernoffParams::new(4, 5, 1.0, 0.5, 4, 1.0).is_err());
        assert!(ChernoffParams::new(0, 1, 1.0, 0.5, 4, 1.0).is_err());
        let p = ChernoffParams::new(4, 4, 1.0, 0.5, 4, 1.0).unwrap();
        assert_eq!(p.ky_fan_factor(), 4.0);
        assert_eq!(p.q(), 8.0);
    }
}
