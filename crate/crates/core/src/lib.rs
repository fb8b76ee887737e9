//! Nonparametric estimation of the service-time distribution of an M/G/∞
//! queue from equally spaced samples of the number of busy servers.

pub mod covest;
pub mod dists;
pub mod error;
pub mod estimators;
pub mod gauss;
pub mod harness;
pub mod lpweights;
pub mod moments;
pub mod quad;
pub mod rng;
pub mod sim;
pub mod stats;

pub use error::{Error, Result};
