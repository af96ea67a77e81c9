//! Antisymmetric tensor powers realised as compound matrices.
//!
//! The `k`-th compound of an `n × n` unfolding has rows and columns indexed
//! by the `k`-subsets of `{0, …, n−1}` in lexicographic order; entry `(S, T)`
//! is the minor with rows `S` and columns `T`. Its eigenvalues are all
//! `k`-fold products of eigenvalues of the input, which makes it a ground
//! truth for statements about `∏ᵢ₌₁ᵏ λᵢ`. Only small sizes are supported.

use serde::{Deserialize, Serialize};

use crate::error::{arg_err, Error, Result};
use crate::linalg::{self, CMat};
use crate::norms;
use crate::tensor::Tensor;

pub const MAX_N: usize = 8;
pub const MAX_K: usize = 4;

/// `k`-th compound of a square unfolding.
#[derive(Debug, Clone, PartialEq)]
pub struct CompoundRep {
    k: usize,
    n: usize,
    matrix: CMat,
}

impl CompoundRep {
    pub fn k(&self) -> usize {
        self.k
    }

    /// Size of the compound, `C(n, k)`.
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Size of the underlying unfolding.
    pub fn base_dim(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMat {
        self.matrix
    }
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        // Rightmost position that can still advance.
        let Some(i) = (0..k).rev().find(|&i| cur[i] < n - k + i) else {
            return out;
        };
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k.min(n - k)).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// `k`-th compound of a square matrix.
pub fn compound_matrix(m: &CMat, k: usize) -> Result<CMat> {
    let n = m.nrows();
    if !m.is_square() {
        return crate::error::shape_err(format!("compound of a {}x{} matrix", n, m.ncols()));
    }
    if k == 0 || k > n {
        return arg_err(format!("compound order k={k} outside 1..={n}"));
    }
    if n > MAX_N || k > MAX_K {
        return Err(Error::Capacity(format!(
            "compound limited to n ≤ {MAX_N}, k ≤ {MAX_K}; got n={n}, k={k}"
        )));
    }
    let subs = subsets(n, k);
    let d = subs.len();
    let mut out = CMat::zeros(d, d);
    for (a, rows) in subs.iter().enumerate() {
        for (b, cols) in subs.iter().enumerate() {
            let minor = CMat::from_fn(k, k, |i, j| m[(rows[i], cols[j])]);
            out[(a, b)] = minor.determinant();
        }
    }
    Ok(out)
}

/// `k`-th compound (antisymmetric power) of a square tensor.
pub fn compound(x: &Tensor, k: usize) -> Result<CompoundRep> {
    if !x.shape().is_square() {
        return crate::error::shape_err(format!(
            "compound needs a square tensor, got {:?}",
            x.shape()
        ));
    }
    Ok(CompoundRep {
        k,
        n: x.dim(),
        matrix: compound_matrix(x.unfolding(), k)?,
    })
}

/// Spectral norm of the compound against the product of the `k` largest
/// singular values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompoundNormReport {
    pub compound_norm: f64,
    pub singular_product: f64,
    pub rel_err: f64,
    pub holds: bool,
}

pub fn compound_norm_check(x: &Tensor, k: usize) -> Result<CompoundNormReport> {
    let c = compound(x, k)?;
    let compound_norm = linalg::spectral_norm(c.matrix())?;
    let singular_product: f64 = norms::singular_values(x)?[..k].iter().product();
    let rel_err = (compound_norm - singular_product).abs() / singular_product.abs().max(f64::MIN_POSITIVE);
    Ok(CompoundNormReport {
        compound_norm,
        singular_product,
        rel_err,
        holds: rel_err <= 1e-8 || (compound_norm - singular_product).abs() <= 1e-12,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::{HermitianTensor, TensorShape};
    use crate::{random, rng, C64};

    fn rel(a: &CMat, b: &CMat) -> f64 {
        linalg::frobenius(&(a - b)) / linalg::frobenius(b).max(1e-300)
    }

    #[test]
    fn subsets_are_lexicographic() {
        assert_eq!(
            subsets(4, 2),
            vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]
        );
        assert_eq!(subsets(8, 4).len(), binomial(8, 4));
        assert_eq!(binomial(8, 4), 70);
    }

    #[test]
    fn first_and_last_compound() {
        let mut r = rng::seeded(50);
        let shape = TensorShape::square(&[2, 2]).unwrap();
        let x = random::gaussian_tensor(&mut r, &shape);
        let c1 = compound(&x, 1).unwrap();
        assert_eq!(c1.matrix(), x.unfolding());
        let c4 = compound(&x, 4).unwrap();
        assert_eq!(c4.dim(), 1);
        let det = x.unfolding().clone().determinant();
        assert!((c4.matrix()[(0, 0)] - det).norm() < 1e-12 * (1.0 + det.norm()));
    }

    #[test]
    fn diagonal_compound_spectrum() {
        let h = HermitianTensor::from_diagonal(&[3], &[3.0, 2.0, 1.0]).unwrap();
        let c = compound(h.as_tensor(), 2).unwrap();
        let vals = linalg::hermitian_eigenvalues(c.matrix()).unwrap();
        for (a, b) in vals.iter().zip([6.0, 3.0, 2.0]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn norm_check_examples() {
        let i = HermitianTensor::identity(&TensorShape::square(&[4]).unwrap()).unwrap();
        for k in 1..=4 {
            let rep = compound_norm_check(i.as_tensor(), k).unwrap();
            assert!((rep.compound_norm - 1.0).abs() < 1e-12 && rep.holds);
        }
        let d = Tensor::from_diagonal(&[2], &[4.0, 2.0]).unwrap();
        let rep = compound_norm_check(&d, 2).unwrap();
        assert!((rep.compound_norm - 8.0).abs() < 1e-12);
    }

    #[test]
    fn limits_and_ranges() {
        let x = Tensor::zeros(TensorShape::square(&[3, 3]).unwrap());
        assert!(matches!(compound(&x, 2), Err(Error::Capacity(_))));
        let y = Tensor::zeros(TensorShape::square(&[3]).unwrap());
        assert!(matches!(compound(&y, 0), Err(Error::Argument(_))));
        assert!(matches!(compound(&y, 4), Err(Error::Argument(_))));
    }

    #[test]
    fn multiplicative_and_adjoint() {
        let mut r = rng::seeded(51);
        let shape = TensorShape::square(&[5]).unwrap();
        for k in 1..=4 {
            let x = random::gaussian_tensor(&mut r, &shape);
            let y = random::gaussian_tensor(&mut r, &shape);
            let cx = compound(&x, k).unwrap().into_matrix();
            let cy = compound(&y, k).unwrap().into_matrix();
            let cxy = compound(&x.einstein_product(&y).unwrap(), k).unwrap().into_matrix();
            assert!(rel(&(&cx * &cy), &cxy) < 1e-9);
            let cxh = compound(&x.conj_transpose(), k).unwrap().into_matrix();
            assert!(rel(&cx.adjoint(), &cxh) < 1e-12);
        }
    }

    #[test]
    fn abs_and_complex_power_commute_with_compound() {
        let mut r = rng::seeded(52);
        let shape = TensorShape::square(&[4]).unwrap();
        let x = random::gaussian_tensor(&mut r, &shape);
        let k = 2;
        let abs_then = compound(x.abs().unwrap().as_tensor(), k).unwrap().into_matrix();
        let cx = compound(&x, k).unwrap().into_matrix();
        let then_abs = linalg::hermitian_map(&(cx.adjoint() * &cx), |v| v.max(0.0).sqrt()).unwrap();
        assert!(rel(&then_abs, &abs_then) < 1e-9);

        let c = random::positive(&mut r, &shape, 0.3, 3.0).unwrap();
        let z = C64::new(0.0, 1.3);
        let lhs = compound(&c.complex_power(z, 0.0).unwrap(), k).unwrap().into_matrix();
        let cc = compound(c.as_tensor(), k).unwrap().into_matrix();
        let cc = HermitianTensor::new(Tensor::fold(TensorShape::square(&[6]).unwrap(), cc).unwrap()).unwrap();
        let rhs = cc.complex_power(z, 0.0).unwrap().into_unfolding();
        assert!(rel(&lhs, &rhs) < 1e-9);
    }
}
