//! Independent numerical checks: quadrature of the `r`-integrals, a
//! finite-matrix rearrangement oracle and the Gauss–Bonnet residual.

mod gauss_bonnet;
mod matrix;
mod quad;
mod series;

pub use gauss_bonnet::{
    cos_mode, curvature_density, engine_functions, gauss_bonnet_residual, gauss_bonnet_residual_with, residual_ratio_test,
    CurvatureSeries, RatioTest, MAX_NORM, RESIDUAL_FLOOR,
};
pub use matrix::{
    matrix_rearrangement_check, random_matrix, random_positive, rearrangement_error, rearrangement_sides,
    RearrangementCase, MAX_DIM,
};
pub use quad::{gauss_legendre, integrate, quad_power_integral, quad_r_integral, Family, QuadratureSpec};
pub use series::{taylor_coefficients, taylor_coefficients_one, Series2};
