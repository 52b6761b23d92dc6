//! Geometry of time-sliced manifolds in conformal Gaussian coordinates
//! `e^{2ψ}(∓dt² + σ_ij dx^i dx^j)` and numerical checks of the volume bounds
//! that follow from mean-curvature estimates on the slices.

// `!(a < b)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod expr;
pub mod numerics;

pub use error::{Error, Result};
pub mod bounds;
pub mod catalog;
pub mod cli;
pub mod config;
pub mod geometry;
pub mod volume;
