//! Experiment runner for the Wishart-to-GOE lab.
//!
//! Everything here is plumbing around [`wglab_core`]: a thread pool that runs
//! block plans without changing their results, the flat experiment config,
//! the `(c, n)` sweep with its CSV table, the `figure1` SVG and the `wglab`
//! command line.

pub mod cli;
pub mod config;
mod error;
pub mod parallel;
pub mod svg;
pub mod sweep;
pub mod table;

pub use config::{ExperimentConfig, Preset};
pub use error::{Error, Result};
pub use parallel::Runner;
pub use sweep::SweepRow;
