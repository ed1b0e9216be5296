//! Limit laws, convergence-rate constants and asymptotic covariance
//! matrices for Poisson processes of k-flats in d-dimensional hyperbolic
//! space.

pub mod covariance;
pub mod error;
pub mod geometry;
pub mod limitlaw;
pub mod params;
pub mod rates;
pub mod simulate;
pub mod special;

pub use error::{Error, Result};
pub use params::{ModelParams, Regime};
