//! Hermitian tensors and their spectral calculus.

use crate::error::{domain_err, shape_err, Error, Result};
use crate::linalg::{self, CMat};
use crate::C64;

use super::{Tensor, TensorShape};

/// Relative tolerance for accepting a tensor as Hermitian, scaled by `‖X‖_F`.
pub const HERM_TOL: f64 = 1e-10;
/// Relative tolerance below which an eigenvalue counts as zero for the rank.
pub const RANK_TOL: f64 = 1e-10;
/// Relative reconstruction tolerance of a spectrum, scaled by `‖H‖_F`.
pub const RECONSTRUCT_TOL: f64 = 1e-9;

/// Square tensor equal to its conjugate transpose. Stored as `(X + Xᴴ)/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianTensor {
    base: Tensor,
}

/// Eigenvalues (descending) and orthonormal eigentensors of a Hermitian
/// tensor.
#[derive(Debug, Clone)]
pub struct Spectrum {
    shape: TensorShape,
    eigenvalues: Vec<f64>,
    vectors: CMat,
    herm_rank: usize,
}

impl HermitianTensor {
    /// Accepts `x` if `max|X − Xᴴ| ≤ 1e-10·‖X‖_F` and stores its Hermitian part.
    pub fn new(x: Tensor) -> Result<Self> {
        let defect = x.hermitian_defect()?;
        let tol = HERM_TOL * x.frobenius_norm().max(f64::MIN_POSITIVE);
        if defect > tol {
            return Err(Error::Domain(format!(
                "tensor is not Hermitian: defect {defect:.3e} exceeds {tol:.3e}"
            )));
        }
        let shape = x.shape.clone();
        Ok(Self {
            base: Tensor {
                shape,
                unfolding: linalg::hermitize(&x.unfolding),
            },
        })
    }

    /// Takes the Hermitian part of a square unfolding without checking.
    pub(crate) fn from_unfolding_hermitized(shape: TensorShape, m: CMat) -> Result<Self> {
        if !shape.is_square() {
            return shape_err(format!("Hermitian tensor needs a square shape, got {shape:?}"));
        }
        Ok(Self {
            base: Tensor::fold(shape, linalg::hermitize(&m))?,
        })
    }

    /// Identity tensor: entries `∏ δ(i_k, j_k)`.
    pub fn identity(shape: &TensorShape) -> Result<Self> {
        if !shape.is_square() {
            return shape_err(format!("identity needs a square shape, got {shape:?}"));
        }
        let n = shape.unfold_rows();
        Ok(Self {
            base: Tensor {
                shape: shape.clone(),
                unfolding: CMat::identity(n, n),
            },
        })
    }

    /// Real diagonal Hermitian tensor on `dims × dims`.
    pub fn from_diagonal(dims: &[usize], diag: &[f64]) -> Result<Self> {
        Ok(Self {
            base: Tensor::from_diagonal(dims, diag)?,
        })
    }

    pub fn zeros(shape: &TensorShape) -> Result<Self> {
        Self::from_unfolding_hermitized(shape.clone(), CMat::zeros(shape.unfold_rows(), shape.unfold_cols()))
    }

    pub fn as_tensor(&self) -> &Tensor {
        &self.base
    }

    pub fn into_tensor(self) -> Tensor {
        self.base
    }

    pub fn shape(&self) -> &TensorShape {
        &self.base.shape
    }

    pub fn unfolding(&self) -> &CMat {
        &self.base.unfolding
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let sum = self.base.add(&other.base)?;
        Self::from_unfolding_hermitized(sum.shape, sum.unfolding)
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            base: self.base.scale(C64::new(factor, 0.0)),
        }
    }

    /// `H + δI`.
    pub fn shifted(&self, delta: f64) -> Self {
        let mut m = self.base.unfolding.clone();
        for i in 0..m.nrows() {
            m[(i, i)] += C64::new(delta, 0.0);
        }
        Self {
            base: Tensor {
                shape: self.base.shape.clone(),
                unfolding: m,
            },
        }
    }

    /// Eigendecomposition `H = Σ λᵢ Uᵢ ⊗ Uᵢᴴ`.
    pub fn eig(&self) -> Result<Spectrum> {
        let (eigenvalues, vectors) = linalg::hermitian_eigen(&self.base.unfolding)?;
        let max = eigenvalues.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let herm_rank = eigenvalues.iter().filter(|v| v.abs() > RANK_TOL * max).count();
        Ok(Spectrum {
            shape: self.base.shape.clone(),
            eigenvalues,
            vectors,
            herm_rank,
        })
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        linalg::hermitian_eigenvalues(&self.base.unfolding)
    }

    /// Spectral calculus `Σ f(λᵢ) Uᵢ ⊗ Uᵢᴴ`. A non-finite `f(λᵢ)` is a
    /// domain error.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        self.eig()?.map(f)
    }

    /// `exp(H)`.
    pub fn exp(&self) -> Result<Self> {
        self.map(f64::exp)
    }

    /// `log(H)`; requires a positive spectrum.
    pub fn log(&self) -> Result<Self> {
        self.eig()?.require_positive("log")?.map(f64::ln)
    }

    /// `C^z = Σ exp(z ln λᵢ) Uᵢ ⊗ Uᵢᴴ` of `C + δI`. Every shifted eigenvalue
    /// must be positive.
    pub fn complex_power(&self, z: C64, delta: f64) -> Result<Tensor> {
        if delta < 0.0 || !delta.is_finite() {
            return domain_err(format!("shift must be a finite δ ≥ 0, got {delta}"));
        }
        let shifted = if delta > 0.0 { self.shifted(delta) } else { self.clone() };
        let spec = shifted.eig()?.require_positive("complex power")?;
        let d: Vec<C64> = spec
            .eigenvalues
            .iter()
            .map(|&l| (z * l.ln()).exp())
            .collect();
        Ok(Tensor {
            shape: self.base.shape.clone(),
            unfolding: linalg::from_eigen(&spec.vectors, &d),
        })
    }

    /// Hermitian determinant: the product of all eigenvalues.
    pub fn det(&self) -> Result<f64> {
        Ok(self.eigenvalues()?.iter().product())
    }

    /// `log det` for a positive tensor, summed in log space.
    pub fn log_det(&self) -> Result<f64> {
        let spec = self.eig()?.require_positive("log-determinant")?;
        Ok(spec.eigenvalues.iter().map(|l| l.ln()).sum())
    }

    pub fn trace(&self) -> f64 {
        linalg::trace(&self.base.unfolding).re
    }

    pub fn spectral_norm(&self) -> Result<f64> {
        let vals = self.eigenvalues()?;
        Ok(vals.first().map_or(0.0, |a| a.abs()).max(vals.last().map_or(0.0, |b| b.abs())))
    }
}

impl Spectrum {
    /// Eigenvalues sorted descending.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Number of eigenvalues with `|λ| > 1e-10·max|λ|`.
    pub fn herm_rank(&self) -> usize {
        self.herm_rank
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Eigentensor `Uᵢ` of shape `row_dims × 1`, unit Frobenius norm.
    pub fn eigentensor(&self, i: usize) -> Result<Tensor> {
        if i >= self.eigenvalues.len() {
            return Err(Error::Argument(format!(
                "eigentensor index {i} outside 0..{}",
                self.eigenvalues.len()
            )));
        }
        let shape = TensorShape::column(self.shape.row_dims())?;
        let col = self.vectors.column(i);
        Tensor::fold(shape, CMat::from_iterator(col.len(), 1, col.iter().copied()))
    }

    pub fn eigentensors(&self) -> Result<Vec<Tensor>> {
        (0..self.len()).map(|i| self.eigentensor(i)).collect()
    }

    /// Unitary whose columns are the eigenvectors of the unfolding.
    pub fn eigenvector_matrix(&self) -> &CMat {
        &self.vectors
    }

    /// `Σ λᵢ Uᵢ ⊗ Uᵢᴴ`.
    pub fn reconstruct(&self) -> Result<HermitianTensor> {
        HermitianTensor::from_unfolding_hermitized(
            self.shape.clone(),
            linalg::from_eigen_real(&self.vectors, &self.eigenvalues),
        )
    }

    /// Applies `f` to every eigenvalue and reassembles.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<HermitianTensor> {
        let mapped = linalg::map_values(&self.eigenvalues, f)?;
        HermitianTensor::from_unfolding_hermitized(
            self.shape.clone(),
            linalg::from_eigen_real(&self.vectors, &mapped),
        )
    }

    fn require_positive(self, op: &str) -> Result<Self> {
        if let Some(&l) = self.eigenvalues.last() {
            if l <= 0.0 {
                return domain_err(format!("{op} needs a positive spectrum, smallest eigenvalue is {l}"));
            }
        }
        Ok(self)
    }
}
