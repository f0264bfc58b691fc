//! Shared numerical engine: adaptive quadrature, one-sided limits and finite
//! differences, and nonnegative least squares.

mod differentiate;
mod nnls;
mod quadrature;

pub use differentiate::{
    checked_derivative, derivative, one_sided_derivative, one_sided_limit, Limit, LimitSpec, Side,
    Stencil,
};
pub use nnls::{nnls_solve, NnlsProblem, NnlsSolution};
pub use quadrature::{integrate, integrate_split, EndpointSingularity, QuadratureSpec, Rule};
