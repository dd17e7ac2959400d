//! Mean-value (strongly) harmonic functions for norm-induced metrics and
//! polynomial-weighted Lebesgue measures on `ℝⁿ`.
//!
//! A function `u` is strongly harmonic for the metric `d(x, y) = ‖x − y‖` and
//! the measure `w dx` when `u(x)` equals its `w`-weighted mean over every
//! admissible ball `B(x, r)`. Such functions are exactly the solutions of the
//! linear PDE system
//!
//! ```text
//! Σ_{|α| = j} A_α (D^α(u w) − u D^α w) = 0,   j = 2, 4, …
//! ```
//!
//! with `A_α = binom(|α|, α) ∫_{B(0,1)} y^α dy`. This crate assembles that
//! system (and its Euclidean specializations) on a polynomial ansatz,
//! computes its kernel exactly, and checks the results against independent
//! quadrature oracles.
//!
//! | module | contents |
//! |---|---|
//! | [`polycore`] | exact polynomials, multi-indices, derivatives |
//! | [`norms`] | `ℓᵖ` and polytope unit balls, gauges, triangulation |
//! | [`moments`] | ball moments, `A_α`, `f(p)`, ellipticity |
//! | [`pde`] | system assembly as exact linear maps |
//! | [`kernel`] | exact / SVD kernels, canonical bases, degree scans |
//! | [`meanvalue`] | Pizzetti, polytope and Monte-Carlo means, verification |
//! | [`cli`] | the command-line surface |
//!
//! Runnable walkthroughs live in `examples/`.

pub mod cli;
pub mod error;
pub mod kernel;
pub mod linalg;
pub mod meanvalue;
pub mod moments;
pub mod norms;
pub mod pde;
pub mod polycore;
pub mod sampling;
pub mod scalar;
pub mod special;

pub use error::{Error, Result};
pub use kernel::{harmonic_space, kernel_basis, stabilization_scan, KernelBasis};
pub use moments::MomentTable;
pub use norms::{LpExponent, NormSpec, Polytope};
pub use polycore::{MultiIndex, Polynomial};
pub use scalar::Scalar;
