//! p-version finite elements for the Poisson problem on parallelogram meshes,
//! with Jacobi-weighted projections, interpolants and a residual a posteriori
//! error estimator.

// `!(x > 0.0)` style checks are how NaN inputs get rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod benchmarks;
pub mod driver;
pub mod error;
pub mod estimator;
pub mod fem;
pub mod interpolation;
pub mod jacobi;
pub mod mesh;
pub mod weighted;

pub use error::{Error, Result};
