//! Unitarily invariant tensor norms computed from singular values of the
//! unfolding.

use serde::{Deserialize, Serialize};

use crate::error::{arg_err, domain_err, Result};
use crate::linalg;
use crate::tensor::{HermitianTensor, Tensor};

/// Norm selector used in experiment configs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "param", rename_all = "snake_case")]
pub enum NormKind {
    KyFan(usize),
    Schatten(f64),
    KTrace(usize),
    Spectral,
}

impl NormKind {
    pub fn evaluate(&self, x: &Tensor) -> Result<f64> {
        match *self {
            NormKind::KyFan(k) => ky_fan_norm(x, k),
            NormKind::Schatten(p) => schatten_norm(x, p),
            NormKind::KTrace(k) => k_trace(&HermitianTensor::new(x.clone())?, k),
            NormKind::Spectral => spectral_norm(x),
        }
    }
}

fn require_square(x: &Tensor) -> Result<()> {
    if !x.shape().is_square() {
        return crate::error::shape_err(format!(
            "norms are defined for square tensors, got {:?}",
            x.shape()
        ));
    }
    Ok(())
}

/// Singular values of the unfolding, descending. These are the eigenvalues
/// of `|X|`.
pub fn singular_values(x: &Tensor) -> Result<Vec<f64>> {
    require_square(x)?;
    linalg::singular_values(x.unfolding())
}

/// Sum of the `k` largest entries of a nonnegative descending vector.
pub fn gauge_rho(v: &[f64], k: usize) -> Result<f64> {
    if k == 0 || k > v.len() {
        return arg_err(format!("gauge index k={k} outside 1..={}", v.len()));
    }
    if let Some(i) = v.iter().position(|x| *x < 0.0 || x.is_nan()) {
        return arg_err(format!("gauge input has negative entry {} at {i}", v[i]));
    }
    if let Some(i) = v.windows(2).position(|w| w[0] < w[1]) {
        return arg_err(format!("gauge input is not sorted descending at {}", i + 1));
    }
    Ok(v[..k].iter().sum())
}

/// Ky Fan `k`-norm: the sum of the `k` largest singular values.
pub fn ky_fan_norm(x: &Tensor, k: usize) -> Result<f64> {
    let s = singular_values(x)?;
    gauge_rho(&s, k)
}

/// Ky Fan `k`-norm of a Hermitian tensor from its eigenvalues: the sum of the
/// `k` largest `|λᵢ|`.
pub fn ky_fan_from_eigenvalues(eigs: &[f64], k: usize) -> Result<f64> {
    let mut s: Vec<f64> = eigs.iter().map(|l| l.abs()).collect();
    s.sort_by(|a, b| b.total_cmp(a));
    gauge_rho(&s, k)
}

/// Operator norm, the largest singular value.
pub fn spectral_norm(x: &Tensor) -> Result<f64> {
    ky_fan_norm(x, 1)
}

/// Schatten `p`-norm `(Tr|X|ᵖ)^{1/p}`; `p = ∞` gives the spectral norm.
pub fn schatten_norm(x: &Tensor, p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return arg_err(format!("Schatten exponent must be ≥ 1, got {p}"));
    }
    let s = singular_values(x)?;
    let top = s.first().copied().unwrap_or(0.0);
    if p.is_infinite() || top == 0.0 {
        return Ok(top);
    }
    // Factor out σ₁ so large p does not overflow.
    let sum: f64 = s.iter().map(|&v| (v / top).powf(p)).sum();
    Ok(top * sum.powf(1.0 / p))
}

/// Elementary symmetric polynomial `e_k` of the given values.
pub fn elementary_symmetric(vals: &[f64], k: usize) -> f64 {
    let mut e = vec![0.0; k + 1];
    e[0] = 1.0;
    for &v in vals {
        for j in (1..=k.min(vals.len())).rev() {
            e[j] += v * e[j - 1];
        }
    }
    e[k]
}

/// `k`-trace `Tr_k(H) = e_k(λ⃗(H))` of a positive semidefinite tensor, with
/// `1 ≤ k ≤` Hermitian rank.
pub fn k_trace(h: &HermitianTensor, k: usize) -> Result<f64> {
    let spec = h.eig()?;
    let vals = spec.eigenvalues();
    let scale = vals.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if let Some(&l) = vals.last() {
        if l < -crate::tensor::RANK_TOL * scale {
            return domain_err(format!("k-trace needs a positive spectrum, found eigenvalue {l}"));
        }
    }
    if k == 0 || k > spec.herm_rank() {
        return arg_err(format!(
            "k-trace index k={k} outside 1..={}",
            spec.herm_rank()
        ));
    }
    let clamped: Vec<f64> = vals.iter().map(|v| v.max(0.0)).collect();
    Ok(elementary_symmetric(&clamped, k))
}
