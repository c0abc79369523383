//! Spectral laboratory for anisotropic operator-valued elliptic and parabolic
//! equations on periodic grids.
//!
//! The abstract space `E` is realized as `C^M` with a `q`-norm and the
//! operator `A` as a positive diagonal matrix. On top of that the crate
//! solves the principal, perturbed and degenerate elliptic problems and
//! the parabolic Cauchy problem, and measures the constants in the
//! embedding, multiplier and coercive inequalities over parameter sweeps.

// NaN must fail validation, hence `!(x > 0.0)` style checks throughout
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod degenerate;
pub mod elliptic;
pub mod embedding;
pub mod error;
pub mod grid_norms;
pub mod operator;
pub mod parabolic;
pub mod random;
pub mod symbols;

pub use error::{Error, Result};
pub use grid_norms::{Field, Grid, MixedExponents, NormSpec, Side, Weight};
pub use operator::DiagOperator;

pub use num_complex::Complex64;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
