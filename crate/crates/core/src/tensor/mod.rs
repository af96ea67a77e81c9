//! Dense complex tensors with paired index groups.
//!
//! A tensor of shape `(I₁…I_M) × (J₁…J_N)` is stored as its unfolding: an
//! `∏I × ∏J` matrix whose row index is the row-major multi-index over the
//! row dimensions and whose column index is the row-major multi-index over
//! the column dimensions. The Einstein product contracting the column group
//! of one tensor with the row group of the next is then exactly matrix
//! multiplication of unfoldings.

mod hermitian;
pub mod io;

pub use hermitian::{HermitianTensor, Spectrum, HERM_TOL, RANK_TOL, RECONSTRUCT_TOL};

use serde::{Deserialize, Serialize};

use crate::error::{shape_err, Result};
use crate::linalg::{self, CMat};
use crate::C64;

/// Row and column dimension groups of a tensor.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TensorShape {
    row_dims: Vec<usize>,
    col_dims: Vec<usize>,
}

impl TensorShape {
    /// Every listed dimension must be at least 1. An empty group has size 1.
    pub fn new(row_dims: Vec<usize>, col_dims: Vec<usize>) -> Result<Self> {
        if row_dims.iter().chain(&col_dims).any(|&d| d == 0) {
            return shape_err(format!(
                "dimensions must be positive, got {row_dims:?} x {col_dims:?}"
            ));
        }
        Ok(Self { row_dims, col_dims })
    }

    /// Square shape `dims × dims`.
    pub fn square(dims: &[usize]) -> Result<Self> {
        Self::new(dims.to_vec(), dims.to_vec())
    }

    /// Column shape `dims × 1`.
    pub fn column(dims: &[usize]) -> Result<Self> {
        Self::new(dims.to_vec(), vec![1])
    }

    pub fn row_dims(&self) -> &[usize] {
        &self.row_dims
    }

    pub fn col_dims(&self) -> &[usize] {
        &self.col_dims
    }

    /// Number of rows of the unfolding, `∏ row_dims`.
    pub fn unfold_rows(&self) -> usize {
        self.row_dims.iter().product()
    }

    /// Number of columns of the unfolding, `∏ col_dims`.
    pub fn unfold_cols(&self) -> usize {
        self.col_dims.iter().product()
    }

    pub fn is_square(&self) -> bool {
        self.row_dims == self.col_dims
    }

    pub fn transposed(&self) -> Self {
        Self {
            row_dims: self.col_dims.clone(),
            col_dims: self.row_dims.clone(),
        }
    }

    /// Shape of a Kronecker product: both groups concatenated.
    pub fn kron(&self, other: &Self) -> Self {
        let mut row_dims = self.row_dims.clone();
        row_dims.extend_from_slice(&other.row_dims);
        let mut col_dims = self.col_dims.clone();
        col_dims.extend_from_slice(&other.col_dims);
        Self { row_dims, col_dims }
    }

    /// Flat row-major offset of a full multi-index `(i₁…i_M, j₁…j_N)`.
    pub fn offset(&self, index: &[usize]) -> Result<(usize, usize)> {
        let m = self.row_dims.len();
        if index.len() != m + self.col_dims.len() {
            return shape_err(format!(
                "index of length {} for tensor of order {}",
                index.len(),
                m + self.col_dims.len()
            ));
        }
        let row = ravel(&index[..m], &self.row_dims)?;
        let col = ravel(&index[m..], &self.col_dims)?;
        Ok((row, col))
    }
}

fn ravel(index: &[usize], dims: &[usize]) -> Result<usize> {
    let mut flat = 0;
    for (&i, &d) in index.iter().zip(dims) {
        if i >= d {
            return shape_err(format!("index {i} out of range for dimension {d}"));
        }
        flat = flat * d + i;
    }
    Ok(flat)
}

/// Dense complex tensor carried as its unfolding.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    shape: TensorShape,
    unfolding: CMat,
}

impl Tensor {
    pub fn zeros(shape: TensorShape) -> Self {
        let unfolding = CMat::zeros(shape.unfold_rows(), shape.unfold_cols());
        Self { shape, unfolding }
    }

    /// Builds a tensor from entries listed in row-major order over
    /// `(i₁…i_M, j₁…j_N)`.
    pub fn from_entries(shape: TensorShape, entries: Vec<C64>) -> Result<Self> {
        let (rows, cols) = (shape.unfold_rows(), shape.unfold_cols());
        if entries.len() != rows * cols {
            return shape_err(format!(
                "expected {} entries for shape {:?}, got {}",
                rows * cols,
                shape,
                entries.len()
            ));
        }
        let unfolding = CMat::from_row_slice(rows, cols, &entries);
        Ok(Self { shape, unfolding })
    }

    /// Folds a matrix back into a tensor of the given shape.
    pub fn fold(shape: TensorShape, unfolding: CMat) -> Result<Self> {
        if unfolding.nrows() != shape.unfold_rows() || unfolding.ncols() != shape.unfold_cols() {
            return shape_err(format!(
                "unfolding is {}x{} but shape {:?} needs {}x{}",
                unfolding.nrows(),
                unfolding.ncols(),
                shape,
                shape.unfold_rows(),
                shape.unfold_cols()
            ));
        }
        Ok(Self { shape, unfolding })
    }

    /// Square tensor with the given real diagonal unfolding.
    pub fn from_diagonal(dims: &[usize], diag: &[f64]) -> Result<Self> {
        let shape = TensorShape::square(dims)?;
        let n = shape.unfold_rows();
        if diag.len() != n {
            return shape_err(format!("diagonal of length {} for size {n}", diag.len()));
        }
        let mut m = CMat::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(d, 0.0);
        }
        Ok(Self { shape, unfolding: m })
    }

    pub fn shape(&self) -> &TensorShape {
        &self.shape
    }

    pub fn unfolding(&self) -> &CMat {
        &self.unfolding
    }

    pub fn into_unfolding(self) -> CMat {
        self.unfolding
    }

    /// Entries in row-major order over the full multi-index.
    pub fn entries(&self) -> Vec<C64> {
        let (rows, cols) = self.unfolding.shape();
        let mut out = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                out.push(self.unfolding[(i, j)]);
            }
        }
        out
    }

    pub fn get(&self, index: &[usize]) -> Result<C64> {
        let (r, c) = self.shape.offset(index)?;
        Ok(self.unfolding[(r, c)])
    }

    /// Size of the square unfolding, `𝕀 = ∏ row_dims`.
    pub fn dim(&self) -> usize {
        self.shape.unfold_rows()
    }

    fn same_shape(&self, other: &Self, op: &str) -> Result<()> {
        if self.shape != other.shape {
            return shape_err(format!(
                "{op}: shapes {:?} and {:?} differ",
                self.shape, other.shape
            ));
        }
        Ok(())
    }

    fn require_square(&self, op: &str) -> Result<()> {
        if !self.shape.is_square() {
            return shape_err(format!("{op} needs a square tensor, got {:?}", self.shape));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_shape(other, "addition")?;
        Ok(Self {
            shape: self.shape.clone(),
            unfolding: &self.unfolding + &other.unfolding,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_shape(other, "subtraction")?;
        Ok(Self {
            shape: self.shape.clone(),
            unfolding: &self.unfolding - &other.unfolding,
        })
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self {
            shape: self.shape.clone(),
            unfolding: self.unfolding.map(|z| z * factor),
        }
    }

    /// Einstein product contracting `self`'s column group with `other`'s
    /// row group.
    pub fn einstein_product(&self, other: &Self) -> Result<Self> {
        if self.shape.col_dims != other.shape.row_dims {
            return shape_err(format!(
                "Einstein product: contracted dimensions {:?} and {:?} differ",
                self.shape.col_dims, other.shape.row_dims
            ));
        }
        let shape = TensorShape {
            row_dims: self.shape.row_dims.clone(),
            col_dims: other.shape.col_dims.clone(),
        };
        Ok(Self {
            shape,
            unfolding: &self.unfolding * &other.unfolding,
        })
    }

    /// Conjugate transpose: swaps the index groups and conjugates entries.
    pub fn conj_transpose(&self) -> Self {
        Self {
            shape: self.shape.transposed(),
            unfolding: self.unfolding.adjoint(),
        }
    }

    /// Plain transpose (no conjugation).
    pub fn transpose(&self) -> Self {
        Self {
            shape: self.shape.transposed(),
            unfolding: self.unfolding.transpose(),
        }
    }

    /// Sum of diagonal entries `X_{i…i, i…i}`.
    pub fn trace(&self) -> Result<C64> {
        self.require_square("trace")?;
        Ok(linalg::trace(&self.unfolding))
    }

    /// `⟨X, Y⟩ = Tr(Xᴴ ⋆ Y)`.
    pub fn inner_product(&self, other: &Self) -> Result<C64> {
        self.same_shape(other, "inner product")?;
        Ok(self
            .unfolding
            .iter()
            .zip(other.unfolding.iter())
            .map(|(x, y)| x.conj() * y)
            .sum())
    }

    pub fn frobenius_norm(&self) -> f64 {
        linalg::frobenius(&self.unfolding)
    }

    /// Kronecker product; the unfolding is the matrix Kronecker product of
    /// the unfoldings and both dimension groups are concatenated.
    pub fn kronecker(&self, other: &Self) -> Self {
        Self {
            shape: self.shape.kron(&other.shape),
            unfolding: self.unfolding.kronecker(&other.unfolding),
        }
    }

    /// Column tensor `col(X)` of shape `(rows ++ cols) × 1`, entries in the
    /// same row-major order.
    pub fn vectorize(&self) -> Self {
        let mut dims = self.shape.row_dims.clone();
        dims.extend_from_slice(&self.shape.col_dims);
        let entries = self.entries();
        let n = entries.len();
        Self {
            shape: TensorShape {
                row_dims: dims,
                col_dims: vec![1],
            },
            unfolding: CMat::from_column_slice(n, 1, &entries),
        }
    }

    /// Operator norm of the unfolding (largest singular value).
    pub fn spectral_norm(&self) -> Result<f64> {
        linalg::spectral_norm(&self.unfolding)
    }

    /// Largest `|X − Xᴴ|` entry, the Hermitian defect.
    pub fn hermitian_defect(&self) -> Result<f64> {
        self.require_square("Hermitian check")?;
        Ok(linalg::hermitian_defect(&self.unfolding))
    }

    /// `|X| = √(Xᴴ ⋆ X)`, computed by the spectral map of the positive
    /// semidefinite tensor `XᴴX`.
    pub fn abs(&self) -> Result<HermitianTensor> {
        self.require_square("absolute value")?;
        let gram = self.conj_transpose().einstein_product(self)?;
        HermitianTensor::from_unfolding_hermitized(gram.shape, gram.unfolding)?
            .map(|x| x.max(0.0).sqrt())
    }

    /// Square unfolding power `Xⁿ` under the Einstein product.
    pub fn power(&self, n: u32) -> Result<Self> {
        self.require_square("power")?;
        Ok(Self {
            shape: self.shape.clone(),
            unfolding: linalg::matrix_power(&self.unfolding, n),
        })
    }

    /// Identity of the same square shape.
    pub fn identity_like(&self) -> Result<Self> {
        self.require_square("identity")?;
        Ok(HermitianTensor::identity(&self.shape)?.into_tensor())
    }

    pub fn max_abs_entry(&self) -> f64 {
        linalg::max_abs(&self.unfolding)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn shape_rejects_zero_dimension() {
        assert!(matches!(
            TensorShape::new(vec![2, 0], vec![1]),
            Err(crate::Error::Shape(_))
        ));
    }

    #[test]
    fn fold_unfold_round_trip() {
        let shape = TensorShape::new(vec![2, 3], vec![3, 2]).unwrap();
        let entries: Vec<C64> = (0..36).map(|i| c(i as f64, -(i as f64) / 3.0)).collect();
        let t = Tensor::from_entries(shape.clone(), entries.clone()).unwrap();
        assert_eq!(t.entries(), entries);
        let back = Tensor::fold(shape, t.unfolding().clone()).unwrap();
        assert_eq!(back, t);
        // (i1,i2,j1,j2) = (1,2,0,1): row 1*3+2 = 5, col 0*2+1 = 1 → flat 5*6+1
        assert_eq!(t.get(&[1, 2, 0, 1]).unwrap(), entries[31]);
    }

    #[test]
    fn einstein_product_rejects_mismatch() {
        let a = Tensor::zeros(TensorShape::new(vec![2], vec![3]).unwrap());
        let b = Tensor::zeros(TensorShape::new(vec![2], vec![2]).unwrap());
        assert!(matches!(a.einstein_product(&b), Err(crate::Error::Shape(_))));
    }

    #[test]
    fn trace_of_non_square_is_error() {
        let a = Tensor::zeros(TensorShape::new(vec![2], vec![3]).unwrap());
        assert!(a.trace().is_err());
    }

    #[test]
    fn purely_imaginary_diagonal_negates_under_adjoint() {
        let shape = TensorShape::square(&[2]).unwrap();
        let t = Tensor::from_entries(shape, vec![c(0.0, 2.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, -5.0)])
            .unwrap();
        let h = t.conj_transpose();
        assert_eq!(h.get(&[0, 0]).unwrap(), c(0.0, -2.0));
        assert_eq!(h.get(&[1, 1]).unwrap(), c(0.0, 5.0));
    }

    #[test]
    fn real_symmetric_is_self_adjoint() {
        let shape = TensorShape::square(&[2]).unwrap();
        let t = Tensor::from_entries(shape, vec![c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(-3.0, 0.0)])
            .unwrap();
        assert_eq!(t.conj_transpose(), t);
    }

    #[test]
    fn vectorize_keeps_row_major_order() {
        let shape = TensorShape::new(vec![2], vec![2]).unwrap();
        let e = vec![c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0), c(4.0, 0.0)];
        let t = Tensor::from_entries(shape, e.clone()).unwrap();
        let v = t.vectorize();
        assert_eq!(v.shape().row_dims(), &[2, 2]);
        assert_eq!(v.entries(), e);
    }
}
