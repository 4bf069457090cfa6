//! Deterministic numerical kernels: adaptive quadrature and damped
//! least-squares fitting.
//!
//! Both algorithms are fixed-order and allocation-light so that a given
//! input always produces bit-identical output, which the file formats rely
//! on.

mod fit;
mod quad;

pub use fit::{
    fit_least_squares, finite_diff_gradient, DataPoint, FitOptions, FitResult,
    LeastSquaresSolution,
};
pub use quad::{integrate, QuadratureSpec};
