//! Operator-valued non-commutative probability over `B = M_d(C)`.
//!
//! Moments, transforms and the free, Boolean and monotone additive
//! convolutions of `B`-valued distributions, with analytic Cauchy and
//! F-transforms on the matricial upper half-plane.

pub mod algebra;
pub mod analytic;
pub mod error;
pub mod io;
pub mod laws;
pub mod partitions;
pub mod sampling;
pub mod series;
pub mod suite;

pub use error::{Error, Result};
