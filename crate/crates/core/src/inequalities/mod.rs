//! Numerical checks of averaged majorization theorems over discrete measures
//! and of the multivariate Ky Fan norm inequalities for positive tensors.

mod discrete;
mod multivariate;
pub mod quadrature;
mod scalar;

pub use discrete::{
    check_applicable, constructed_instance, doubly_stochastic_mix, verify_discrete_average_majorization,
    AverageMode, AverageReport, DiscreteMeasure,
};
pub use multivariate::{
    check_multivariate, golden_thompson_lhs, golden_thompson_rhs_linear, golden_thompson_rhs_log,
    lie_trotter_bound, lie_trotter_error, loglog_slope, MultivariateReport, PositiveFamily, QuadratureValue,
};
pub use quadrature::{beta0_antiderivative, beta0_density, beta_density, GaussLegendre, QuadratureSpec};
pub use scalar::{log_exp_convexity_warning, ScalarFunction};
