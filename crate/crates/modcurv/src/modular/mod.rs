//! Modular curvature functions: exact `r`-integration of sphere-averaged
//! `b_2` terms after moving every `k` to the front with the modular operator.

pub mod dd;
mod function;
mod integrate;
mod poly;
mod ratfun;
mod report;
mod signature;

pub use function::{is_negation, parse_function, Basis, SymbolicFunction, SINGULAR_RADIUS};
pub use integrate::{family_derivative_dim_m, family_integral_dim2, integrate_dim2, integrate_dim_m, integrate_signature};
pub use poly::{q, Factor, Poly2, Q};
pub use ratfun::RatFun;
pub use report::{averaged_b2, derive_curvature, f_one, signatures_of, CurvatureReport, KPowers, Normalization, Operator};
pub use signature::{extract_signature, Channel, TermSignature};
