//! Multivariate Ky Fan norm inequalities for positive tensors
//!
//! ```text
//! ‖f(exp Σ log Cᵢ)‖_(k) ≤ exp ∫ log ‖f(|∏ Cᵢ^{1+it}|)‖_(k) β₀(t) dt
//! ‖g(exp Σ log Cᵢ)‖_(k) ≤ ∫ ‖g(|∏ Cᵢ^{1+it}|)‖_(k) β₀(t) dt
//! ```
//!
//! with the right-hand sides integrated by Gauss–Legendre on `[−T, T]`, plus
//! the Lie–Trotter product formula error.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{arg_err, Error, Result};
use crate::linalg::{self, CMat};
use crate::norms;
use crate::tensor::{HermitianTensor, TensorShape};
use crate::C64;

use super::quadrature::{beta0_density, beta0_tail_mass, QuadratureSpec};
use super::ScalarFunction;

/// A right-hand side evaluated by truncated quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureValue {
    pub value: f64,
    /// Bound on the contribution of `|t| > T`, in the units of `value`.
    pub truncation_bound: f64,
    /// `|I_n − I_{n/2}|` plus a round-off floor, in the units of `value`.
    pub quadrature_error: f64,
}

impl QuadratureValue {
    /// Total tolerance to allow when comparing against `value`.
    pub fn slack(&self) -> f64 {
        self.truncation_bound + self.quadrature_error
    }
}

/// Positive tensors with cached eigendecompositions.
#[derive(Debug, Clone)]
pub struct PositiveFamily {
    shape: TensorShape,
    eigs: Vec<(Vec<f64>, CMat)>,
}

impl PositiveFamily {
    pub fn new(cs: &[HermitianTensor]) -> Result<Self> {
        let Some(first) = cs.first() else {
            return arg_err("need at least one tensor");
        };
        let mut eigs = Vec::with_capacity(cs.len());
        for c in cs {
            if c.shape() != first.shape() {
                return crate::error::shape_err(format!(
                    "shapes {:?} and {:?} differ",
                    first.shape(),
                    c.shape()
                ));
            }
            let spec = c.eig()?;
            let vals = spec.eigenvalues().to_vec();
            if let Some(&l) = vals.last() {
                if l <= 0.0 {
                    return Err(Error::Domain(format!(
                        "tensors must be positive, found eigenvalue {l}"
                    )));
                }
            }
            eigs.push((vals, spec.eigenvector_matrix().clone()));
        }
        Ok(Self {
            shape: first.shape().clone(),
            eigs,
        })
    }

    /// `∏ Cᵢ^{1+it}` as an unfolding.
    pub fn product_power(&self, t: f64) -> CMat {
        let z = C64::new(1.0, t);
        let n = self.shape.unfold_rows();
        let mut acc = CMat::identity(n, n);
        for (vals, vecs) in &self.eigs {
            let d: Vec<C64> = vals.iter().map(|&l| (z * l.ln()).exp()).collect();
            acc *= linalg::from_eigen(vecs, &d);
        }
        acc
    }

    /// Range `[∏ λ_min, ∏ λ_max]` containing every singular value of
    /// `∏ Cᵢ^{1+it}`.
    pub fn singular_range(&self) -> (f64, f64) {
        self.eigs.iter().fold((1.0, 1.0), |(lo, hi), (v, _)| {
            (lo * v.last().copied().unwrap_or(1.0), hi * v[0])
        })
    }

    /// `‖f(|∏ Cᵢ^{1+it}|)‖_(k)`.
    pub fn integrand(&self, f: ScalarFunction, k: usize, t: f64) -> Result<f64> {
        let sv = linalg::singular_values(&self.product_power(t))?;
        ky_fan_of_values(&sv, f, k)
    }

    /// `exp(Σ log Cᵢ)` as a Hermitian tensor.
    pub fn exp_sum_log(&self) -> Result<HermitianTensor> {
        let n = self.shape.unfold_rows();
        let mut sum = CMat::zeros(n, n);
        for (vals, vecs) in &self.eigs {
            let logs: Vec<f64> = vals.iter().map(|l| l.ln()).collect();
            sum += linalg::from_eigen_real(vecs, &logs);
        }
        HermitianTensor::from_unfolding_hermitized(self.shape.clone(), sum)?.exp()
    }
}

fn ky_fan_of_values(vals: &[f64], f: ScalarFunction, k: usize) -> Result<f64> {
    let mut mapped = linalg::map_values(vals, |x| f.eval(x))?;
    for v in &mut mapped {
        *v = v.abs();
    }
    mapped.sort_by(|a, b| b.total_cmp(a));
    norms::gauge_rho(&mapped, k)
}

/// `‖f(exp Σ log Cᵢ)‖_(k)`.
pub fn golden_thompson_lhs(f: ScalarFunction, cs: &[HermitianTensor], k: usize) -> Result<f64> {
    let fam = PositiveFamily::new(cs)?;
    let e = fam.exp_sum_log()?;
    let mapped = e.map(|x| f.eval(x))?;
    norms::ky_fan_norm(mapped.as_tensor(), k)
}

/// Node values in node order; the parallel map keeps ordering, and the sum
/// is taken sequentially so the result does not depend on thread count.
fn integrate(
    rule_nodes: &[(f64, f64)],
    h: &(dyn Fn(f64) -> Result<f64> + Sync),
) -> Result<(f64, f64)> {
    let vals: Vec<f64> = rule_nodes
        .par_iter()
        .map(|&(t, _)| h(t))
        .collect::<Result<_>>()?;
    let mut sum = 0.0;
    let mut abs = 0.0;
    for (&(t, w), v) in rule_nodes.iter().zip(&vals) {
        let term = w * beta0_density(t) * v;
        sum += term;
        abs += term.abs();
    }
    Ok((sum, abs))
}

enum Form {
    Log,
    Linear,
}

fn rhs(
    form: Form,
    f: ScalarFunction,
    cs: &[HermitianTensor],
    k: usize,
    quad: &QuadratureSpec,
) -> Result<QuadratureValue> {
    quad.validate()?;
    let fam = PositiveFamily::new(cs)?;
    let n = fam.shape.unfold_rows();
    if k == 0 || k > n {
        return arg_err(format!("Ky Fan index k={k} outside 1..={n}"));
    }
    let (a, b) = fam.singular_range();
    let (fmin, fmax) = f.range_on(a, b);
    let tail = beta0_tail_mass(quad.truncation);
    let t = quad.truncation;
    let fine = super::quadrature::GaussLegendre::new(quad.node_count)?.on_interval(-t, t);
    let coarse = super::quadrature::GaussLegendre::new(quad.node_count / 2)?.on_interval(-t, t);

    match form {
        Form::Log => {
            if fmin.is_nan() || fmin <= 0.0 {
                return Err(Error::Quadrature(format!(
                    "log integrand is unbounded: {} reaches {fmin} on [{a}, {b}]",
                    f.name()
                )));
            }
            let h = |t: f64| Ok(fam.integrand(f, k, t)?.ln());
            let (i_fine, abs) = integrate(&fine, &h)?;
            let (i_coarse, _) = integrate(&coarse, &h)?;
            let value = i_fine.exp();
            // |log ‖f(|P|)‖_(k)| ≤ max(|log min f|, |log(k·max f)|).
            let m_log = fmin.ln().abs().max((k as f64 * fmax).ln().abs());
            let truncation_bound = value * (m_log * tail).exp_m1();
            let err_log = (i_fine - i_coarse).abs() + 64.0 * f64::EPSILON * abs;
            let quadrature_error = value * err_log.exp_m1();
            check_truncation(truncation_bound, value, quad)?;
            Ok(QuadratureValue {
                value,
                truncation_bound,
                quadrature_error,
            })
        }
        Form::Linear => {
            let h = |t: f64| fam.integrand(f, k, t);
            let (value, abs) = integrate(&fine, &h)?;
            let (coarse_value, _) = integrate(&coarse, &h)?;
            let truncation_bound = k as f64 * fmax.abs() * tail;
            let quadrature_error = (value - coarse_value).abs() + 64.0 * f64::EPSILON * abs;
            check_truncation(truncation_bound, value, quad)?;
            Ok(QuadratureValue {
                value,
                truncation_bound,
                quadrature_error,
            })
        }
    }
}

fn check_truncation(bound: f64, value: f64, quad: &QuadratureSpec) -> Result<()> {
    if !bound.is_finite() || bound > quad.tolerance * value.abs().max(1.0) {
        return Err(Error::Quadrature(format!(
            "truncation error bound {bound:.3e} at T = {} exceeds tolerance {:.1e}",
            quad.truncation, quad.tolerance
        )));
    }
    Ok(())
}

/// `exp ∫ log ‖f(|∏ Cᵢ^{1+it}|)‖_(k) β₀(t) dt` over `[−T, T]`.
pub fn golden_thompson_rhs_log(
    f: ScalarFunction,
    cs: &[HermitianTensor],
    k: usize,
    quad: &QuadratureSpec,
) -> Result<QuadratureValue> {
    rhs(Form::Log, f, cs, k, quad)
}

/// `∫ ‖g(|∏ Cᵢ^{1+it}|)‖_(k) β₀(t) dt` over `[−T, T]`.
pub fn golden_thompson_rhs_linear(
    g: ScalarFunction,
    cs: &[HermitianTensor],
    k: usize,
    quad: &QuadratureSpec,
) -> Result<QuadratureValue> {
    rhs(Form::Linear, g, cs, k, quad)
}

/// Both forms of the multivariate inequality for one tuple.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultivariateReport {
    pub lhs_log: f64,
    pub rhs_log: QuadratureValue,
    pub lhs_linear: f64,
    pub rhs_linear: QuadratureValue,
    pub log_holds: bool,
    pub linear_holds: bool,
}

impl MultivariateReport {
    pub fn holds(&self) -> bool {
        self.log_holds && self.linear_holds
    }
}

pub fn check_multivariate(
    f: ScalarFunction,
    g: ScalarFunction,
    cs: &[HermitianTensor],
    k: usize,
    quad: &QuadratureSpec,
) -> Result<MultivariateReport> {
    let lhs_log = golden_thompson_lhs(f, cs, k)?;
    let rhs_log = golden_thompson_rhs_log(f, cs, k, quad)?;
    let lhs_linear = golden_thompson_lhs(g, cs, k)?;
    let rhs_linear = golden_thompson_rhs_linear(g, cs, k, quad)?;
    let round = |x: f64| 1e-10 * x.abs();
    Ok(MultivariateReport {
        log_holds: lhs_log <= rhs_log.value + rhs_log.slack() + round(lhs_log),
        linear_holds: lhs_linear <= rhs_linear.value + rhs_linear.slack() + round(lhs_linear),
        lhs_log,
        rhs_log,
        lhs_linear,
        rhs_linear,
    })
}

/// `‖(∏ exp(L_k/n))ⁿ − exp(Σ L_k)‖` in the spectral norm.
pub fn lie_trotter_error(ls: &[HermitianTensor], n: u32) -> Result<f64> {
    let Some(first) = ls.first() else {
        return arg_err("need at least one tensor");
    };
    if n == 0 {
        return arg_err("n must be at least 1");
    }
    let dim = first.dim();
    let mut step = CMat::identity(dim, dim);
    let mut sum = CMat::zeros(dim, dim);
    for l in ls {
        if l.shape() != first.shape() {
            return crate::error::shape_err("Lie–Trotter inputs must share a shape");
        }
        step *= l.scale(1.0 / n as f64).exp()?.unfolding();
        sum += l.unfolding();
    }
    let target = linalg::hermitian_map(&sum, f64::exp)?;
    linalg::spectral_norm(&(linalg::matrix_power(&step, n) - target))
}

/// The two-term estimate `2 exp(2‖L₁‖ + 2‖L₂‖) / n`.
pub fn lie_trotter_bound(l1: &HermitianTensor, l2: &HermitianTensor, n: u32) -> Result<f64> {
    let s = l1.spectral_norm()? + l2.spectral_norm()?;
    Ok(2.0 * (2.0 * s).exp() / n as f64)
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return arg_err("slope fit needs two or more paired points");
    }
    if xs.iter().chain(ys).any(|v| v.is_nan() || *v <= 0.0) {
        return Err(Error::Domain("slope fit needs positive data".into()));
    }
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let m = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / m, ly.iter().sum::<f64>() / m);
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{random, rng};

    fn quad() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn single_tensor_integrand_is_constant() {
        let mut r = rng::seeded(70);
        let shape = TensorShape::square(&[3]).unwrap();
        let c = random::positive(&mut r, &shape, 0.3, 2.5).unwrap();
        let cs = [c.clone()];
        let lhs = golden_thompson_lhs(ScalarFunction::Identity, &cs, 2).unwrap();
        assert!((lhs - norms::ky_fan_norm(c.as_tensor(), 2).unwrap()).abs() < 1e-12);
        let fam = PositiveFamily::new(&cs).unwrap();
        for t in [-4.0, 0.0, 1.7] {
            assert!((fam.integrand(ScalarFunction::Identity, 2, t).unwrap() - lhs).abs() < 1e-10);
        }
        let rhs = golden_thompson_rhs_linear(ScalarFunction::Identity, &cs, 2, &quad()).unwrap();
        assert!((lhs - rhs.value).abs() <= rhs.slack() + 1e-12);
    }

    #[test]
    fn commuting_tuples_are_tight() {
        let mut r = rng::seeded(71);
        let shape = TensorShape::square(&[2, 2]).unwrap();
        let u = random::unitary_matrix(&mut r, 4);
        let cs: Vec<HermitianTensor> = (0..3)
            .map(|_| {
                let eigs: Vec<f64> = (0..4).map(|i| 0.4 + 0.5 * i as f64 + 0.1 * (i * i) as f64).collect();
                random::with_basis(&u, &shape, &eigs).unwrap()
            })
            .collect();
        for f in [ScalarFunction::Identity, ScalarFunction::Square] {
            let rep = check_multivariate(f, f, &cs, 2, &quad()).unwrap();
            assert!((rep.lhs_log - rep.rhs_log.value).abs() <= rep.rhs_log.slack() + 1e-10 * rep.lhs_log);
            assert!((rep.lhs_linear - rep.rhs_linear.value).abs() <= rep.rhs_linear.slack() + 1e-10 * rep.lhs_linear);
        }
    }

    #[test]
    fn random_pairs_satisfy_both_forms() {
        let mut r = rng::seeded(72);
        let shape = TensorShape::square(&[3]).unwrap();
        for trial in 0..30 {
            let cs: Vec<HermitianTensor> = (0..2 + trial % 2)
                .map(|_| random::positive(&mut r, &shape, 0.2, 2.0).unwrap())
                .collect();
            let f = [ScalarFunction::Identity, ScalarFunction::Square, ScalarFunction::Exp][trial % 3];
            let rep = check_multivariate(f, ScalarFunction::Identity, &cs, 1 + trial % 3, &quad()).unwrap();
            assert!(rep.holds(), "trial {trial}: {rep:?}");
        }
    }

    #[test]
    fn determinant_of_complex_product_is_product_of_determinants() {
        let mut r = rng::seeded(73);
        let shape = TensorShape::square(&[2, 2]).unwrap();
        let cs: Vec<HermitianTensor> = (0..3).map(|_| random::positive(&mut r, &shape, 0.3, 2.0).unwrap()).collect();
        let fam = PositiveFamily::new(&cs).unwrap();
        let want: f64 = cs.iter().map(|c| c.det().unwrap()).product();
        for t in [-1.3, 0.4, 2.2] {
            let sv = linalg::singular_values(&fam.product_power(t)).unwrap();
            let det: f64 = sv.iter().product();
            assert!((det - want).abs() < 1e-10 * want);
        }
    }

    #[test]
    fn nonpositive_inputs_are_rejected() {
        let h = HermitianTensor::from_diagonal(&[2], &[1.0, 0.0]).unwrap();
        assert!(matches!(golden_thompson_lhs(ScalarFunction::Identity, &[h], 1), Err(Error::Domain(_))));
    }

    #[test]
    fn short_window_is_a_quadrature_error() {
        let mut r = rng::seeded(74);
        let shape = TensorShape::square(&[2]).unwrap();
        let cs = [random::positive(&mut r, &shape, 0.5, 3.0).unwrap()];
        let q = QuadratureSpec { truncation: 0.5, ..QuadratureSpec::default() };
        assert!(matches!(
            golden_thompson_rhs_linear(ScalarFunction::Identity, &cs, 1, &q),
            Err(Error::Quadrature(_))
        ));
    }

    #[test]
    fn lie_trotter_commuting_and_decay() {
        let a = HermitianTensor::from_diagonal(&[2], &[0.3, -0.7]).unwrap();
        let b = HermitianTensor::from_diagonal(&[2], &[-0.2, 0.5]).unwrap();
        for n in [1, 2, 8, 64] {
            assert!(lie_trotter_error(&[a.clone(), b.clone()], n).unwrap() <= 1e-10);
        }
        let mut r = rng::seeded(75);
        let shape = TensorShape::square(&[3]).unwrap();
        let l1 = random::hermitian(&mut r, &shape, 0.5).unwrap();
        let l2 = random::hermitian(&mut r, &shape, 0.5).unwrap();
        let e1 = lie_trotter_error(&[l1.clone(), l2.clone()], 1).unwrap();
        let e64 = lie_trotter_error(&[l1.clone(), l2.clone()], 64).unwrap();
        assert!(e1 / e64 >= 32.0, "{e1} / {e64}");
        for n in [1, 4, 16, 256] {
            assert!(lie_trotter_error(&[l1.clone(), l2.clone()], n).unwrap() <= lie_trotter_bound(&l1, &l2, n).unwrap());
        }
    }

    #[test]
    fn slope_of_power_law() {
        let xs: Vec<f64> = (0..6).map(|j| 2f64.powi(j)).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 / x).collect();
        assert!((loglog_slope(&xs, &ys).unwrap() + 1.0).abs() < 1e-12);
    }
}
