//! Metrics in conformal Gaussian form and the geometry of their time slices.
//!
//! Sign conventions: Lorentzian slices use the past-directed unit normal
//! `ν = -e^{-ψ}(1, 0, …, 0)`, so `∂_t g_ij = -2 e^ψ h_ij`; Riemannian slices
//! use the outward normal `ν = e^{-ψ}(1, 0, …, 0)`, so `∂_t g_ij = 2 e^ψ h_ij`.
//! A crunching universe therefore has `H > 0` in the Lorentzian convention.

mod cmc;
mod field;
mod metric;
mod slice;

pub use field::{AxisFieldFn, FieldFn, ScalarField2, SpaceDependence};
pub use metric::{MetricSpec, Signature, TimeWindow};
pub use slice::{NormalVector, SliceGeometry};
