//! Exact arithmetic: rationals, sparse multivariate polynomials, rational
//! functions and exact matrices.

mod matrix;
mod monomial;
mod poly;
mod ratfunc;
mod text;
mod var;

pub use matrix::{charpoly, RatMatrix};
pub use monomial::Monomial;
pub use poly::SparsePoly;
pub use ratfunc::RatFunc;
pub use text::ParsePolyError;
pub use var::{Var, VarNames};

use num_bigint::BigInt;

/// Exact rational scalar; always stored in lowest terms with a positive
/// denominator.
pub type Rational = num_rational::BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}
