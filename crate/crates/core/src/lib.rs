//! Stable and consistent low-order autoregressive filter models built from
//! equilibrium statistics.
//!
//! The core types are generic over the real scalar ([`num::Real`], `f32` or
//! `f64`); the symbolic side works over exact rationals. The aliases below
//! cover the common double-precision case.

pub mod algebra;
pub mod armodel;
pub mod error;
pub mod filter;
pub mod linalg;
pub mod num;
pub mod scar;
pub mod signals;

pub use error::{Error, Result};

/// Complex scalar in double precision.
pub type Complex64 = num::C<f64>;
/// AR model in double precision.
pub type Model = armodel::ArModel<f64>;
/// AR model in single precision.
pub type Model32 = armodel::ArModel<f32>;
/// Complex time series in double precision.
pub type Series = armodel::TimeSeries<f64>;
/// Complex time series in single precision.
pub type Series32 = armodel::TimeSeries<f32>;
/// Filter state in double precision.
pub type State = filter::FilterState<f64>;
/// Multivariate polynomial with rational coefficients.
pub type Poly = algebra::ExactPoly;
