//! Exact multivariate polynomials and multi-index calculus.

mod multiindex;
mod parse;
mod polynomial;

pub use multiindex::MultiIndex;
pub use polynomial::{CompiledPolynomial, Polynomial};
pub(crate) use multiindex::factorial;
