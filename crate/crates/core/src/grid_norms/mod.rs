//! Periodic grids, spectral transforms and derivatives, weighted mixed norms.

mod ap;
pub(crate) mod fft;
mod field;
mod grid;
mod norms;
mod weight;

pub use ap::{ap_constant_estimate, ApEstimate, Cube};
pub use field::{forward_transform, inverse_transform, spectral_derivative, Field, Side};
pub use grid::Grid;
pub use norms::{
    component_norm, mixed_norm, mixed_norm_of_values, pointwise_norms, MixedExponents, NormSpec,
};
pub use weight::{AxisWeight, Weight};
