//! Monte Carlo estimate of `Pr(‖f(Σⱼ g(vⱼ))‖_(k) ≥ ϑ)` along stationary
//! walks.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{arg_err, Result};
use crate::expander::batch_walk;
use crate::linalg::{hermitian_eigenvalues, CMat};
use crate::norms::ky_fan_from_eigenvalues;

use super::{PolynomialSpec, VertexTensorAssignment};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailEstimate {
    pub p_hat: f64,
    pub stderr: f64,
    pub num_walks: usize,
    /// Walks whose sum `S` fails `f(exp(tS)) ⪰ exp(t·f(S))` at the checked `t`.
    pub assumption3_violations: usize,
}

/// Unfolding of `Σⱼ g(vⱼ)` for one walk.
pub fn walk_sum(assign: &VertexTensorAssignment, walk: &[usize]) -> CMat {
    let d = assign.dim();
    let mut s = CMat::zeros(d, d);
    for &v in walk {
        s += assign.tensor(v).unfolding();
    }
    s
}

/// Walk `i` uses stream `i` of `seed`, and the counts are integer sums, so
/// the estimate does not depend on how walks are spread over threads.
///
/// Both sides of the Loewner hypothesis `f(e^{tS}) ⪰ e^{t·f(S)}` are spectral functions of the same Hermitian
/// `S`, so the Loewner comparison reduces to `f(e^{tμ}) ≥ exp(t·f(μ))` for
/// every eigenvalue `μ` of `S`, up to `1e-9·max(1, |rhs|)`.
#[allow(clippy::too_many_arguments)]
pub fn empirical_tail(
    assign: &VertexTensorAssignment,
    poly: &PolynomialSpec,
    k: usize,
    theta: f64,
    num_walks: usize,
    kappa: usize,
    seed: u64,
    t_check: f64,
) -> Result<TailEstimate> {
    let mut out = tail_sweep(assign, poly, k, &[(theta, t_check)], num_walks, kappa, seed)?;
    Ok(out.remove(0))
}

/// [`empirical_tail`] for several `(ϑ, t_check)` pairs on one shared set of
/// walks; each walk sum is diagonalized once.
pub fn tail_sweep(
    assign: &VertexTensorAssignment,
    poly: &PolynomialSpec,
    k: usize,
    points: &[(f64, f64)],
    num_walks: usize,
    kappa: usize,
    seed: u64,
) -> Result<Vec<TailEstimate>> {
    poly.validate()?;
    if num_walks == 0 || kappa == 0 {
        return arg_err("need at least one walk of length at least 1");
    }
    if k == 0 || k > assign.dim() {
        return arg_err(format!("k = {k} outside 1..={}", assign.dim()));
    }
    let graph = assign.graph();
    let outcomes = (0..num_walks as u64)
        .into_par_iter()
        .map(|i| -> Result<Vec<(bool, bool)>> {
            let walk = batch_walk(graph, kappa, seed, i);
            let mu = hermitian_eigenvalues(&walk_sum(assign, &walk))?;
            let f_mu = mu.iter().map(|&m| poly.eval(m)).collect::<Result<Vec<_>>>()?;
            let norm = ky_fan_from_eigenvalues(&f_mu, k)?;
            points
                .iter()
                .map(|&(theta, t)| {
                    let mut violated = false;
                    for (&m, &fm) in mu.iter().zip(&f_mu) {
                        let lhs = poly.eval((t * m).exp())?;
                        let rhs = (t * fm).exp();
                        if lhs < rhs - 1e-9 * rhs.abs().max(1.0) {
                            violated = true;
                        }
                    }
                    Ok((norm >= theta, violated))
                })
                .collect()
        })
        .collect::<Result<Vec<_>>>()?;
    let n = num_walks as f64;
    Ok((0..points.len())
        .map(|j| {
            let hits = outcomes.iter().filter(|o| o[j].0).count();
            let violations = outcomes.iter().filter(|o| o[j].1).count();
            let p_hat = hits as f64 / n;
            TailEstimate {
                p_hat,
                stderr: (p_hat * (1.0 - p_hat) / n).sqrt(),
                num_walks,
                assumption3_violations: violations,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expander::gen_complete;
    use crate::{HermitianTensor, TensorShape};

    #[test]
    fn trivial_thresholds() {
        let assign = VertexTensorAssignment::random(gen_complete(4).unwrap(), &[2], 1.0, 2).unwrap();
        let f = PolynomialSpec::new(vec![1.0, 0.0, 1.0], 1.0).unwrap();
        let est = empirical_tail(&assign, &f, 1, 1e-12, 2000, 5, 1, 0.1).unwrap();
        assert_eq!(est.p_hat, 1.0);
        let zero = HermitianTensor::zeros(&TensorShape::square(&[2]).unwrap()).unwrap();
        let flat = VertexTensorAssignment::constant(gen_complete(4).unwrap(), zero).unwrap();
        let est = empirical_tail(&flat, &PolynomialSpec::identity(), 1, 0.5, 2000, 5, 1, 0.1).unwrap();
        assert_eq!(est.p_hat, 0.0);
        assert_eq!(est.assumption3_violations, 0);
    }

    #[test]
    fn identity_never_violates_the_hypothesis() {
        let assign = VertexTensorAssignment::random(gen_complete(4).unwrap(), &[2, 2], 1.0, 5).unwrap();
        let est = empirical_tail(&assign, &PolynomialSpec::identity(), 2, 8.0, 5000, 8, 9, 0.7).unwrap();
        assert_eq!(est.assumption3_violations, 0);
        assert!(est.p_hat > 0.0 && est.p_hat < 1.0, "{est:?}");
    }

    #[test]
    fn squares_violate_the_hypothesis_somewhere() {
        // (e^{tμ})² ≥ e^{tμ²} fails once tμ² > 2tμ, e.g. μ > 2.
        let shape = TensorShape::square(&[2]).unwrap();
        let g = HermitianTensor::from_diagonal(&[2], &[1.0, -1.0]).unwrap();
        assert_eq!(g.shape(), &shape);
        let assign = VertexTensorAssignment::constant(gen_complete(3).unwrap(), g).unwrap();
        let sq = PolynomialSpec::new(vec![0.0, 0.0, 1.0], 1.0).unwrap();
        let est = empirical_tail(&assign, &sq, 1, 1.0, 100, 4, 3, 1.0).unwrap();
        assert_eq!(est.assumption3_violations, 100);
    }

    #[test]
    fn sweep_matches_single_points() {
        let assign = VertexTensorAssignment::random(gen_complete(4).unwrap(), &[2, 2], 1.0, 6).unwrap();
        let f = PolynomialSpec::identity();
        let points = [(4.0, 0.2), (6.0, 0.5), (8.0, 0.9)];
        let sweep = tail_sweep(&assign, &f, 2, &points, 3000, 8, 4).unwrap();
        for (&(theta, t), est) in points.iter().zip(&sweep) {
            assert_eq!(*est, empirical_tail(&assign, &f, 2, theta, 3000, 8, 4, t).unwrap());
        }
        assert!(sweep[0].p_hat >= sweep[1].p_hat && sweep[1].p_hat >= sweep[2].p_hat);
    }
}
