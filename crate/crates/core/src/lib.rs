//! Weighted Minkowski problems on the sphere and Monge-Ampère equations with
//! atomic right-hand side.

pub mod envelope;
pub mod error;
pub mod geometry;
pub mod hull;
pub mod lift;
pub mod linalg;
pub mod measure;
pub mod minkowski;
pub mod pipeline;
pub mod quadrature;
pub mod verify;

pub use error::{Error, Result};
