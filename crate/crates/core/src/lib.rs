//! Pairwise-concurrence networks for ground states of the open XX chain.

pub mod analysis;
pub mod cli;
pub mod community;
pub mod error;
pub mod metrics;
pub mod network;
pub mod oracle;
pub mod xx_solver;

pub use error::{Error, Result};
