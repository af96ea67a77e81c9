//! Gaussian domination of `β₀` and the tail bound evaluators.

use std::f64::consts::PI;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{arg_err, Error, Result};
use crate::inequalities::quadrature::beta0_density;
use crate::rng::Rng;

use super::{ChernoffParams, PolynomialSpec};

/// Grid size used to fit and verify a domination.
const DOMINATION_GRID: usize = 10_001;
/// Relative headroom added to the fitted `C` so that off-grid points pass.
const DOMINATION_SLACK: f64 = 1e-12;

/// Constants with `β₀(τ) ≤ C·exp(−τ²/2σ²)/(σ√(2π))` for `|τ| ≤ window`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DominationFit {
    pub c: f64,
    pub sigma: f64,
    pub window: f64,
    pub verified: bool,
}

impl DominationFit {
    pub fn gaussian(&self, tau: f64) -> f64 {
        self.c * (-tau * tau / (2.0 * self.sigma * self.sigma)).exp() / (self.sigma * (2.0 * PI).sqrt())
    }

    pub fn dominates(&self, tau: f64) -> bool {
        beta0_density(tau) <= self.gaussian(tau)
    }

    /// Number of violations at `samples` uniform points of the window.
    pub fn audit(&self, samples: usize, rng: &mut Rng) -> usize {
        (0..samples)
            .filter(|_| !self.dominates(rng.random_range(-self.window..=self.window)))
            .count()
    }
}

/// `β₀(τ)·σ√(2π)·e^{τ²/2σ²}`, the smallest `C` that works at `τ`.
fn required_c(sigma: f64, tau: f64) -> f64 {
    beta0_density(tau) * sigma * (2.0 * PI).sqrt() * (tau * tau / (2.0 * sigma * sigma)).exp()
}

fn grid(window: f64) -> impl Iterator<Item = f64> {
    let h = 2.0 * window / (DOMINATION_GRID - 1) as f64;
    (0..DOMINATION_GRID).map(move |i| -window + h * i as f64)
}

/// 200 log-spaced values in `[0.1, 10]`.
pub fn default_sigma_grid() -> Vec<f64> {
    (0..200).map(|i| 10f64.powf(-1.0 + 2.0 * i as f64 / 199.0)).collect()
}

/// For each `σ` the required `C` is the maximum over a symmetric grid that
/// contains `0` and `±window`; the `σ` with the smallest such `C` wins. The
/// returned fit is re-checked on the grid before `verified` is set.
///
/// `ln(β₀(τ)e^{τ²/2σ²})` has derivative `τ/σ² − π tanh(πτ/2)`, which changes
/// sign at most once on `τ > 0`, so the maximum over the window sits at `0`
/// or at the edge and both are grid points.
pub fn fit_gaussian_domination(window: f64, sigma_grid: &[f64]) -> Result<DominationFit> {
    if !(window > 0.0 && window.is_finite()) {
        return arg_err(format!("domination window must be positive, got {window}"));
    }
    if sigma_grid.is_empty() || sigma_grid.iter().any(|s| !(*s > 0.0 && s.is_finite())) {
        return arg_err("σ grid must be nonempty and positive");
    }
    let mut best: Option<(f64, f64)> = None;
    for &sigma in sigma_grid {
        let c = grid(window).map(|tau| required_c(sigma, tau)).fold(0.0, f64::max);
        if c.is_finite() && best.is_none_or(|(bc, _)| c < bc) {
            best = Some((c, sigma));
        }
    }
    let (c, sigma) = best.ok_or_else(|| Error::Numerical("no σ gives a finite domination constant".into()))?;
    let mut fit = DominationFit {
        c: c * (1.0 + DOMINATION_SLACK),
        sigma,
        window,
        verified: false,
    };
    fit.verified = grid(window).all(|tau| fit.dominates(tau));
    Ok(fit)
}

/// Search range for the minimization over `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TSearch {
    pub t_min: f64,
    pub t_max: f64,
    pub grid: usize,
}

impl Default for TSearch {
    fn default() -> Self {
        Self {
            t_min: 1e-6,
            t_max: 100.0,
            grid: 400,
        }
    }
}

impl TSearch {
    pub fn validate(&self) -> Result<()> {
        if !(self.t_min > 0.0 && self.t_max > self.t_min && self.t_max.is_finite()) {
            return arg_err(format!("empty t bracket [{}, {}]", self.t_min, self.t_max));
        }
        if self.grid < 3 {
            return arg_err("t grid needs at least 3 points");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoremBound {
    pub value: f64,
    pub log_value: f64,
    pub t_opt: f64,
    /// The bound is at least 1 and says nothing.
    pub vacuous: bool,
    /// Whether the expectation lemma's hypotheses `lsrt < 1` and
    /// `λ(2e^{lsrt} − 1) ≤ 1` hold at `t_opt` for the top power `l` (at
    /// `τ = 0`). The bound's statement does not carry them.
    pub lemma_preconditions_hold: bool,
}

/// Logarithm of
/// `(n+1)^{s−1} e^{−ϑt} (a₀k + C(k + √((𝕀₁ᴹ−k)/k)) Σ_{l≥1} aₗ exp(8κλ̄ + 2qlsrt + 2(σqlsr)²t²))`
/// with `q = κ + 8λ̄`, evaluated as a log-sum-exp.
pub fn theorem_log_objective(params: &ChernoffParams, poly: &PolynomialSpec, fit: &DominationFit, t: f64) -> f64 {
    let (s, r, q) = (poly.power, params.radius, params.q());
    let kappa = params.kappa as f64;
    let mut logs = Vec::with_capacity(poly.coefficients.len());
    if poly.coefficients[0] > 0.0 {
        logs.push((poly.coefficients[0] * params.k as f64).ln());
    }
    let lead = (fit.c * params.ky_fan_factor()).ln();
    for (l, &a) in poly.coefficients.iter().enumerate().skip(1) {
        if a > 0.0 {
            let w = q * l as f64 * s * r;
            let e = 8.0 * kappa * params.lambda_bar + 2.0 * w * t + 2.0 * (fit.sigma * w * t).powi(2);
            logs.push(lead + a.ln() + e);
        }
    }
    let m = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lse = m + logs.iter().map(|x| (x - m).exp()).sum::<f64>().ln();
    (s - 1.0) * ((poly.degree() + 1) as f64).ln() - params.theta * t + lse
}

/// Minimum over `t` of the tail bound: log-spaced grid over the search range,
/// then golden-section refinement around the best grid point down to a
/// relative bracket of `1e-10`.
pub fn theorem_bound(
    params: &ChernoffParams,
    poly: &PolynomialSpec,
    fit: &DominationFit,
    search: &TSearch,
) -> Result<TheoremBound> {
    params.validate()?;
    poly.validate()?;
    search.validate()?;
    if !fit.verified {
        return Err(Error::Precondition("domination fit has not been verified".into()));
    }
    let obj = |t: f64| theorem_log_objective(params, poly, fit, t);
    let (lo, hi) = (search.t_min.ln(), search.t_max.ln());
    let ts: Vec<f64> = (0..search.grid)
        .map(|i| (lo + (hi - lo) * i as f64 / (search.grid - 1) as f64).exp())
        .collect();
    let vals: Vec<f64> = ts.iter().map(|&t| obj(t)).collect();
    let best = (0..ts.len()).min_by(|&a, &b| vals[a].total_cmp(&vals[b])).unwrap_or(0);
    let a = ts[best.saturating_sub(1)];
    let b = ts[(best + 1).min(ts.len() - 1)];
    let (mut t_opt, mut log_value) = golden_section(&obj, a, b);
    if vals[best] < log_value {
        t_opt = ts[best];
        log_value = vals[best];
    }
    let lemma_preconditions_hold = poly.top_power().is_none_or(|l| {
        let x = l as f64 * poly.power * params.radius * t_opt;
        x < 1.0 && params.lambda() * (2.0 * x.exp() - 1.0) <= 1.0
    });
    let value = log_value.exp();
    Ok(TheoremBound {
        value,
        log_value,
        t_opt,
        vacuous: value >= 1.0,
        lemma_preconditions_hold,
    })
}

fn golden_section(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a).abs() <= 1e-10 * b.abs() {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    let t = (a + b) / 2.0;
    (t, f(t))
}

/// Minimizer `t* = (ϑ − 2qr)/(4σ²q²r²)` of the identity-polynomial exponent,
/// `q = κ + 8λ̄`. Nonpositive `t*` means the bound is vacuous for this `ϑ`.
pub fn corollary_t(params: &ChernoffParams, fit: &DominationFit) -> Result<f64> {
    params.validate()?;
    let (q, r, s2) = (params.q(), params.radius, fit.sigma * fit.sigma);
    let t = (params.theta - 2.0 * q * r) / (4.0 * s2 * q * q * r * r);
    if t <= 0.0 {
        return Err(Error::Precondition(format!(
            "ϑ = {} does not exceed 2(κ+8λ̄)r = {}",
            params.theta,
            2.0 * q * r
        )));
    }
    Ok(t)
}

/// Closed form of the identity-polynomial bound at `t*`:
/// `C(k + √((𝕀₁ᴹ−k)/k))·exp(8κλ̄ − (ϑ − 2qr)²/(8σ²q²r²))`.
pub fn corollary_bound(params: &ChernoffParams, fit: &DominationFit) -> Result<f64> {
    corollary_t(params, fit)?;
    if !fit.verified {
        return Err(Error::Precondition("domination fit has not been verified".into()));
    }
    let (q, r, s2) = (params.q(), params.radius, fit.sigma * fit.sigma);
    let gap = params.theta - 2.0 * q * r;
    let exponent = 8.0 * params.kappa as f64 * params.lambda_bar - gap * gap / (8.0 * s2 * q * q * r * r);
    Ok(fit.c * params.ky_fan_factor() * exponent.exp())
}
