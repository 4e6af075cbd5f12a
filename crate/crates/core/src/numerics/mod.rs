//! Numeric kernels shared by the physics modules.

pub mod linalg;
pub mod poly;
pub mod quadrature;

pub use linalg::{characteristic_polynomial, linear_solve_dense, DenseMatrix, LinalgError, Mat4};
pub use poly::{
    cubic_real_roots, routh_hurwitz_quartic, HurwitzCondition, PolyError, PolynomialReal,
    RouthHurwitz,
};
pub use quadrature::{
    integrate_adaptive, integrate_with_breakpoints, QuadratureError, QuadratureOptions,
    QuadratureResult,
};
