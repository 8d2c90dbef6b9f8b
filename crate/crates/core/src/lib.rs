//! Rigged configurations and paths for nonexceptional affine types.

pub mod bijection;
pub mod cartan;
pub mod crystal;
pub mod energy;
pub mod error;
pub mod half;
pub mod qpoly;
pub mod rc;

pub use cartan::{AffineType, Family};
pub use error::{Error, Result};
pub use half::Half;
