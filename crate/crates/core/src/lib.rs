//! Quasi-Monte Carlo volumes, boundary hyperareas and separability probabilities of two-qubit
//! states under monotone metrics.

pub mod error;
pub mod linalg;
pub mod metrics;
pub mod qstate;
pub mod sequences;
pub mod integrate;
pub mod analytic;
pub mod cli;

pub use error::{Error, Result};
