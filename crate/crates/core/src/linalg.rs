//! Dense matrix kernels shared by the tensor layer and the verifiers.
//!
//! Everything here acts on square unfoldings. Hermitian eigendecomposition
//! is nalgebra's `SymmetricEigen` (Householder tridiagonalization followed by
//! implicit QR), which is deterministic for a fixed input and platform.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::C64;

pub type CMat = DMatrix<C64>;
pub type RMat = DMatrix<f64>;

const EIG_MAX_ITER: usize = 100_000;

/// Eigenpairs of a Hermitian matrix, eigenvalues sorted descending; the
/// columns of the returned matrix are the matching orthonormal eigenvectors.
pub fn hermitian_eigen(m: &CMat) -> Result<(Vec<f64>, CMat)> {
    if !m.is_square() {
        return Err(Error::Shape(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let n = m.nrows();
    if n == 0 {
        return Ok((Vec::new(), CMat::zeros(0, 0)));
    }
    let eig = SymmetricEigen::try_new(m.clone(), f64::EPSILON, EIG_MAX_ITER)
        .ok_or_else(|| Error::Numerical("Hermitian eigensolver did not converge".into()))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMat::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    Ok((values, vectors))
}

/// Eigenvalues only, sorted descending.
pub fn hermitian_eigenvalues(m: &CMat) -> Result<Vec<f64>> {
    Ok(hermitian_eigen(m)?.0)
}

/// Real symmetric eigenpairs, eigenvalues sorted descending.
pub fn symmetric_eigen(m: &RMat) -> Result<(Vec<f64>, RMat)> {
    let n = m.nrows();
    let eig = SymmetricEigen::try_new(m.clone(), f64::EPSILON, EIG_MAX_ITER)
        .ok_or_else(|| Error::Numerical("symmetric eigensolver did not converge".into()))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = RMat::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    Ok((values, vectors))
}

/// `U diag(d) Uᴴ` for complex diagonal `d`.
pub fn from_eigen(vectors: &CMat, diag: &[C64]) -> CMat {
    let mut scaled = vectors.clone();
    for (j, &d) in diag.iter().enumerate() {
        for z in scaled.column_mut(j).iter_mut() {
            *z *= d;
        }
    }
    scaled * vectors.adjoint()
}

/// `U diag(f(λ)) Uᴴ` for real-valued `f`.
pub fn from_eigen_real(vectors: &CMat, diag: &[f64]) -> CMat {
    let d: Vec<C64> = diag.iter().map(|&x| C64::new(x, 0.0)).collect();
    from_eigen(vectors, &d)
}

/// Applies a real scalar function to a Hermitian matrix through its
/// eigendecomposition. Non-finite outputs are a domain error.
pub fn hermitian_map(m: &CMat, f: impl Fn(f64) -> f64) -> Result<CMat> {
    let (vals, vecs) = hermitian_eigen(m)?;
    let mapped = map_values(&vals, f)?;
    Ok(hermitize(&from_eigen_real(&vecs, &mapped)))
}

pub(crate) fn map_values(vals: &[f64], f: impl Fn(f64) -> f64) -> Result<Vec<f64>> {
    vals.iter()
        .map(|&x| {
            let y = f(x);
            if y.is_finite() {
                Ok(y)
            } else {
                Err(Error::Domain(format!(
                    "scalar function is not finite at eigenvalue {x}"
                )))
            }
        })
        .collect()
}

/// Hermitian part `(M + Mᴴ)/2`.
pub fn hermitize(m: &CMat) -> CMat {
    (m + m.adjoint()).scale(0.5)
}

/// Largest entrywise deviation from Hermitian symmetry.
pub fn hermitian_defect(m: &CMat) -> f64 {
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Singular values, descending.
pub fn singular_values(m: &CMat) -> Result<Vec<f64>> {
    let svd = nalgebra::SVD::try_new(m.clone(), false, false, f64::EPSILON, EIG_MAX_ITER)
        .ok_or_else(|| Error::Numerical("SVD did not converge".into()))?;
    let mut s: Vec<f64> = svd.singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    Ok(s)
}

/// Operator (spectral) norm.
pub fn spectral_norm(m: &CMat) -> Result<f64> {
    if m.is_empty() {
        return Ok(0.0);
    }
    Ok(singular_values(m)?[0])
}

/// Operator norm of a real matrix.
pub fn spectral_norm_real(m: &RMat) -> Result<f64> {
    if m.is_empty() {
        return Ok(0.0);
    }
    let svd = nalgebra::SVD::try_new(m.clone(), false, false, f64::EPSILON, EIG_MAX_ITER)
        .ok_or_else(|| Error::Numerical("SVD did not converge".into()))?;
    Ok(svd.singular_values.max())
}

/// Matrix exponential of a Hermitian matrix scaled by a complex factor:
/// `exp(z·H) = U diag(exp(z λ)) Uᴴ`.
pub fn hermitian_exp_scaled(h: &CMat, z: C64) -> Result<CMat> {
    let (vals, vecs) = hermitian_eigen(h)?;
    let d: Vec<C64> = vals.iter().map(|&l| (z * l).exp()).collect();
    Ok(from_eigen(&vecs, &d))
}

/// Smallest eigenvalue of the Hermitian part.
pub fn min_eigenvalue(m: &CMat) -> Result<f64> {
    let vals = hermitian_eigenvalues(&hermitize(m))?;
    Ok(*vals.last().unwrap_or(&0.0))
}

/// Integer matrix power by repeated squaring.
pub fn matrix_power(m: &CMat, mut n: u32) -> CMat {
    let mut result = CMat::identity(m.nrows(), m.ncols());
    let mut base = m.clone();
    while n > 0 {
        if n & 1 == 1 {
            result = &result * &base;
        }
        n >>= 1;
        if n > 0 {
            base = &base * &base;
        }
    }
    result
}

pub fn trace(m: &CMat) -> C64 {
    (0..m.nrows().min(m.ncols())).map(|i| m[(i, i)]).sum()
}

pub fn frobenius(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Largest entrywise modulus.
pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigen_sorted_descending_and_reconstructs() {
        let m = CMat::from_row_slice(
            3,
            3,
            &[
                C64::new(2.0, 0.0),
                C64::new(0.0, 1.0),
                C64::new(0.0, 0.0),
                C64::new(0.0, -1.0),
                C64::new(2.0, 0.0),
                C64::new(0.5, 0.0),
                C64::new(0.0, 0.0),
                C64::new(0.5, 0.0),
                C64::new(-1.0, 0.0),
            ],
        );
        let (vals, vecs) = hermitian_eigen(&m).unwrap();
        assert!(vals.windows(2).all(|w| w[0] >= w[1]));
        let back = from_eigen_real(&vecs, &vals);
        assert!(frobenius(&(back - &m)) < 1e-12);
    }

    #[test]
    fn matrix_power_matches_repeated_product() {
        let m = CMat::from_fn(3, 3, |i, j| C64::new((i + 2 * j) as f64 * 0.1, (i as f64) * 0.05));
        let mut direct = CMat::identity(3, 3);
        for _ in 0..7 {
            direct = &direct * &m;
        }
        assert!(frobenius(&(matrix_power(&m, 7) - direct)) < 1e-12);
    }
}
