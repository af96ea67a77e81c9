//! Scalar functions applied spectrally, with the shape information the
//! majorization theorems need (monotonicity, convexity, log-convexity in the
//! exponential variable).

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "param", rename_all = "snake_case")]
pub enum ScalarFunction {
    Identity,
    Square,
    /// `xᵖ` on `(0, ∞)`.
    Power(f64),
    Exp,
    /// `max(x + c, 0)`.
    ShiftedRelu(f64),
    /// `max(c − x, 0)`.
    ReflectedRelu(f64),
}

impl ScalarFunction {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            ScalarFunction::Identity => x,
            ScalarFunction::Square => x * x,
            ScalarFunction::Power(p) => x.powf(p),
            ScalarFunction::Exp => x.exp(),
            ScalarFunction::ShiftedRelu(c) => (x + c).max(0.0),
            ScalarFunction::ReflectedRelu(c) => (c - x).max(0.0),
        }
    }

    pub fn name(&self) -> String {
        match *self {
            ScalarFunction::Identity => "x".into(),
            ScalarFunction::Square => "x^2".into(),
            ScalarFunction::Power(p) => format!("x^{p}"),
            ScalarFunction::Exp => "exp".into(),
            ScalarFunction::ShiftedRelu(c) => format!("max(x+{c},0)"),
            ScalarFunction::ReflectedRelu(c) => format!("max({c}-x,0)"),
        }
    }

    /// Whether the function is defined (finite) on all of `[lo, hi]`.
    pub fn defined_on(&self, lo: f64, _hi: f64) -> bool {
        match *self {
            ScalarFunction::Power(_) => lo > 0.0,
            _ => true,
        }
    }

    pub fn nonnegative_on(&self, lo: f64, hi: f64) -> bool {
        match *self {
            ScalarFunction::Identity => lo >= 0.0,
            _ => self.defined_on(lo, hi),
        }
    }

    pub fn nondecreasing_on(&self, lo: f64, _hi: f64) -> bool {
        match *self {
            ScalarFunction::Identity | ScalarFunction::Exp | ScalarFunction::ShiftedRelu(_) => true,
            ScalarFunction::Square => lo >= 0.0,
            ScalarFunction::Power(p) => p >= 0.0,
            ScalarFunction::ReflectedRelu(c) => lo >= c,
        }
    }

    pub fn convex_on(&self, lo: f64, hi: f64) -> bool {
        match *self {
            ScalarFunction::Power(p) => self.defined_on(lo, hi) && (p >= 1.0 || p <= 0.0),
            _ => true,
        }
    }

    /// Whether `u ↦ log f(eᵘ)` is convex for `eᵘ ∈ [lo, hi]` (requires `lo > 0`
    /// and `f > 0` there).
    pub fn log_exp_convex_on(&self, lo: f64, _hi: f64) -> bool {
        if lo <= 0.0 {
            return false;
        }
        match *self {
            ScalarFunction::Identity
            | ScalarFunction::Square
            | ScalarFunction::Power(_)
            | ScalarFunction::Exp => true,
            // log(eᵘ + c) is convex for c ≥ 0 and concave where positive for c < 0.
            ScalarFunction::ShiftedRelu(c) => c >= 0.0,
            ScalarFunction::ReflectedRelu(_) => false,
        }
    }

    /// Whether `u ↦ g(eᵘ)` is convex for `eᵘ ∈ [lo, hi]`.
    pub fn exp_convex_on(&self, lo: f64, hi: f64) -> bool {
        if lo <= 0.0 {
            return false;
        }
        match *self {
            ScalarFunction::ReflectedRelu(_) => false,
            _ => self.defined_on(lo, hi),
        }
    }

    /// Exact range `[min f, max f]` over `[lo, hi]`, using the known shape.
    pub fn range_on(&self, lo: f64, hi: f64) -> (f64, f64) {
        let (a, b) = (self.eval(lo), self.eval(hi));
        match *self {
            ScalarFunction::Square if lo < 0.0 && hi > 0.0 => (0.0, a.max(b)),
            _ => (a.min(b), a.max(b)),
        }
    }
}

/// Samples `u ↦ log f(eᵘ)` on a uniform grid over `[ln lo, ln hi]` and
/// reports the first negative second difference beyond round-off, if any.
/// Convexity of an arbitrary callable cannot be decided, so this only warns.
pub fn log_exp_convexity_warning(
    f: &dyn Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    points: usize,
) -> Option<String> {
    if lo <= 0.0 || hi <= lo || points < 3 {
        return Some(format!("cannot sample log f(e^u) on [{lo}, {hi}]"));
    }
    let (a, b) = (lo.ln(), hi.ln());
    let h = (b - a) / (points - 1) as f64;
    let vals: Vec<f64> = (0..points).map(|i| f((a + h * i as f64).exp()).ln()).collect();
    for (i, w) in vals.windows(3).enumerate() {
        let second = w[0] - 2.0 * w[1] + w[2];
        let scale = w.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        if !second.is_finite() || second < -1e-9 * (1.0 + scale) {
            let u = a + h * (i + 1) as f64;
            return Some(format!("log f(e^u) is not convex near u = {u:.6}"));
        }
    }
    None
}
