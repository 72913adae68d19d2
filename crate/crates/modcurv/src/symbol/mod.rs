//! Noncommutative symbol calculus for the resolvent parametrix.
//!
//! Expressions are sums of words in the atoms `b0`, `k`, `nabla k`,
//! `nabla^2 k` (noncentral) and scalar `xi`/metric data (central).

mod atom;
mod calculus;
mod expr;
mod monomial;

pub use atom::{Atom, Idx, Kind, Variance};
pub use calculus::{a_j, horizontal, horizontal2, resolvent_b, resolvent_terms, vertical, Symbols};
pub use expr::{coeff_string, parse_expr, Expr};
pub use monomial::{imaginary, rational, Coeff, Monomial, Word};
