//! Hermitian tensor algebra under the Einstein product, unitarily invariant
//! norms, majorization, multivariate norm inequalities and tensor expander
//! Chernoff bounds, together with the numerical machinery that checks each
//! inequality against brute-force oracles and Monte Carlo simulation.
//!
//! Every square tensor is carried together with its square unfolding
//! (row-major multi-index over the row dimensions, then over the column
//! dimensions). The Einstein product is matrix multiplication of unfoldings,
//! so spectral calculus reduces to dense Hermitian eigendecomposition.

pub mod antisym;
pub mod chernoff;
pub mod error;
pub mod expander;
pub mod harness;
pub mod inequalities;
pub mod linalg;
pub mod majorization;
pub mod norms;
pub mod random;
pub mod rng;
pub mod tensor;

pub use error::{Error, Result};
pub use tensor::{HermitianTensor, Spectrum, Tensor, TensorShape};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
