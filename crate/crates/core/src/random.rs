//! Random tensor ensembles used by the verifiers and tests.

use nalgebra::QR;
use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};

use crate::error::Result;
use crate::linalg::{self, CMat};
use crate::rng::Rng;
use crate::tensor::{HermitianTensor, Tensor, TensorShape};
use crate::C64;

fn complex_normal(rng: &mut Rng) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Matrix with iid standard complex Gaussian entries.
pub fn gaussian_matrix(rng: &mut Rng, rows: usize, cols: usize) -> CMat {
    // Fill row by row so the draw order does not depend on storage order.
    let mut m = CMat::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m[(i, j)] = complex_normal(rng);
        }
    }
    m
}

/// Tensor with iid standard complex Gaussian entries.
pub fn gaussian_tensor(rng: &mut Rng, shape: &TensorShape) -> Tensor {
    let m = gaussian_matrix(rng, shape.unfold_rows(), shape.unfold_cols());
    Tensor::fold(shape.clone(), m).expect("unfolding built from shape")
}

/// Hermitian tensor `scale·(G + Gᴴ)/2` with `G` complex Gaussian.
pub fn hermitian(rng: &mut Rng, shape: &TensorShape, scale: f64) -> Result<HermitianTensor> {
    let g = gaussian_tensor(rng, shape).scale(C64::new(scale, 0.0));
    HermitianTensor::from_unfolding_hermitized(shape.clone(), g.into_unfolding())
}

/// Haar-distributed unitary of size `n`: QR of a complex Gaussian matrix with
/// the phases of `diag(R)` pushed into `Q`.
pub fn unitary_matrix(rng: &mut Rng, n: usize) -> CMat {
    let g = gaussian_matrix(rng, n, n);
    let qr = QR::new(g);
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        for z in q.column_mut(j).iter_mut() {
            *z *= phase;
        }
    }
    q
}

/// Square tensor with a Haar-random unitary unfolding.
pub fn unitary(rng: &mut Rng, shape: &TensorShape) -> Result<Tensor> {
    let q = unitary_matrix(rng, shape.unfold_rows());
    Tensor::fold(shape.clone(), q)
}

/// Hermitian tensor `U diag(eigs) Uᴴ` with Haar `U`.
pub fn with_spectrum(rng: &mut Rng, shape: &TensorShape, eigs: &[f64]) -> Result<HermitianTensor> {
    let u = unitary_matrix(rng, shape.unfold_rows());
    with_basis(&u, shape, eigs)
}

/// Hermitian tensor `U diag(eigs) Uᴴ` on a given basis.
pub fn with_basis(u: &CMat, shape: &TensorShape, eigs: &[f64]) -> Result<HermitianTensor> {
    if eigs.len() != shape.unfold_rows() {
        return crate::error::shape_err(format!(
            "{} eigenvalues for a tensor of size {}",
            eigs.len(),
            shape.unfold_rows()
        ));
    }
    HermitianTensor::from_unfolding_hermitized(shape.clone(), linalg::from_eigen_real(u, eigs))
}

/// Positive definite tensor with eigenvalues uniform in `[lo, hi]`.
pub fn positive(rng: &mut Rng, shape: &TensorShape, lo: f64, hi: f64) -> Result<HermitianTensor> {
    let eigs: Vec<f64> = (0..shape.unfold_rows())
        .map(|_| rng.random_range(lo..=hi))
        .collect();
    with_spectrum(rng, shape, &eigs)
}
