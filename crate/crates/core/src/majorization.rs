//! Majorization predicates on descending vectors and the Ky Fan sum
//! inequality `‖|Σ Cᵢ|ˢ‖_(k) ≤ m^{s−1} Σ ‖|Cᵢ|ˢ‖_(k)`.

use serde::{Deserialize, Serialize};

use crate::error::{arg_err, domain_err, shape_err, Result};
use crate::norms;
use crate::tensor::Tensor;

/// Real vector sorted descending at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SortedVec {
    entries: Vec<f64>,
    positive: bool,
}

impl SortedVec {
    pub fn new(mut entries: Vec<f64>) -> Result<Self> {
        if entries.iter().any(|x| x.is_nan()) {
            return arg_err("vector contains NaN");
        }
        entries.sort_by(|a, b| b.total_cmp(a));
        let positive = entries.iter().all(|&x| x > 0.0);
        Ok(Self { entries, positive })
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Whether every entry is strictly positive.
    pub fn is_positive(&self) -> bool {
        self.positive
    }

    fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    fn logs(&self) -> Result<Vec<f64>> {
        if !self.positive {
            return domain_err("log majorization needs strictly positive entries");
        }
        Ok(self.entries.iter().map(|x| x.ln()).collect())
    }
}

/// Outcome of a majorization test. `first_failure` is the 1-based partial
/// length `k` at which the comparison first fails; `k = len` also covers a
/// failed total equality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub holds: bool,
    pub first_failure: Option<usize>,
}

impl Verdict {
    fn pass() -> Self {
        Self { holds: true, first_failure: None }
    }

    fn fail(k: usize) -> Self {
        Self { holds: false, first_failure: Some(k) }
    }
}

/// Default tolerance `1e-9·(1 + max|entry|)` over both vectors.
pub fn default_tol(a: &[f64], b: &[f64]) -> f64 {
    let m = a.iter().chain(b).fold(0.0_f64, |m, x| m.max(x.abs()));
    1e-9 * (1.0 + m)
}

fn same_len(y: &SortedVec, x: &SortedVec) -> Result<()> {
    if y.len() != x.len() {
        return arg_err(format!("vector lengths differ: {} vs {}", y.len(), x.len()));
    }
    Ok(())
}

fn partial_sums_dominate(y: &[f64], x: &[f64], tol: f64) -> Verdict {
    let (mut sx, mut sy) = (0.0, 0.0);
    for (k, (a, b)) in x.iter().zip(y).enumerate() {
        sx += a;
        sy += b;
        if sx > sy + tol {
            return Verdict::fail(k + 1);
        }
    }
    Verdict::pass()
}

fn with_total(y: &[f64], x: &[f64], tol: f64) -> Verdict {
    let v = partial_sums_dominate(y, x, tol);
    if !v.holds {
        return v;
    }
    let (tx, ty): (f64, f64) = (x.iter().sum(), y.iter().sum());
    if (tx - ty).abs() > tol {
        return Verdict::fail(x.len());
    }
    v
}

/// `x ≺_w y`: every partial sum of `x` is at most that of `y`.
pub fn weak_majorizes(y: &SortedVec, x: &SortedVec, tol: Option<f64>) -> Result<Verdict> {
    same_len(y, x)?;
    let tol = tol.unwrap_or_else(|| 1e-9 * (1.0 + y.max_abs().max(x.max_abs())));
    Ok(partial_sums_dominate(&y.entries, &x.entries, tol))
}

/// `x ≺ y`: weak majorization plus equal totals.
pub fn majorizes(y: &SortedVec, x: &SortedVec, tol: Option<f64>) -> Result<Verdict> {
    same_len(y, x)?;
    let tol = tol.unwrap_or_else(|| 1e-9 * (1.0 + y.max_abs().max(x.max_abs())));
    Ok(with_total(&y.entries, &x.entries, tol))
}

/// `x ≺_{w log} y`: partial products compared as partial sums of logs.
pub fn weak_log_majorizes(y: &SortedVec, x: &SortedVec, tol: Option<f64>) -> Result<Verdict> {
    same_len(y, x)?;
    let (ly, lx) = (y.logs()?, x.logs()?);
    let tol = tol.unwrap_or_else(|| default_tol(&ly, &lx));
    Ok(partial_sums_dominate(&ly, &lx, tol))
}

/// `x ≺_log y`: weak log majorization plus equal total products.
pub fn log_majorizes(y: &SortedVec, x: &SortedVec, tol: Option<f64>) -> Result<Verdict> {
    same_len(y, x)?;
    let (ly, lx) = (y.logs()?, x.logs()?);
    let tol = tol.unwrap_or_else(|| default_tol(&ly, &lx));
    Ok(with_total(&ly, &lx, tol))
}

/// Both sides of the Ky Fan sum inequality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KyFanSumReport {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// `‖|X|ˢ‖_(k)`: sum of the `k` largest `σᵢ(X)ˢ`.
pub fn ky_fan_of_abs_power(x: &Tensor, s: f64, k: usize) -> Result<f64> {
    let sv: Vec<f64> = norms::singular_values(x)?.iter().map(|v| v.powf(s)).collect();
    norms::gauge_rho(&sv, k)
}

/// Evaluates `‖|Σ Cᵢ|ˢ‖_(k)` against `m^{s−1} Σ ‖|Cᵢ|ˢ‖_(k)`.
pub fn check_kyfan_sum_inequality(tensors: &[Tensor], s: f64, k: usize) -> Result<KyFanSumReport> {
    let Some(first) = tensors.first() else {
        return arg_err("Ky Fan sum inequality needs at least one tensor");
    };
    if s.is_nan() || s < 1.0 {
        return arg_err(format!("exponent s must be ≥ 1, got {s}"));
    }
    let mut sum = first.clone();
    for t in &tensors[1..] {
        if t.shape() != first.shape() {
            return shape_err(format!(
                "Ky Fan sum inequality: shapes {:?} and {:?} differ",
                first.shape(),
                t.shape()
            ));
        }
        sum = sum.add(t)?;
    }
    let lhs = ky_fan_of_abs_power(&sum, s, k)?;
    let m = tensors.len() as f64;
    let mut acc = 0.0;
    for t in tensors {
        acc += ky_fan_of_abs_power(t, s, k)?;
    }
    let rhs = m.powf(s - 1.0) * acc;
    let holds = lhs <= rhs + 1e-9 * (1.0 + rhs);
    Ok(KyFanSumReport { lhs, rhs, holds })
}
