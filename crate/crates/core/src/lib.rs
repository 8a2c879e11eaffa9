//! Numerics for the Wishart-to-GOE total variation transition.
//!
//! This crate is `no_std` (it needs `alloc`) and holds every pure algorithm:
//! reproducible Gaussian streams, the two random matrix ensembles, a symmetric
//! eigensolver, the exact Wishart and GOE log-densities together with the
//! centered-moment decomposition of their log-ratio, Monte Carlo estimators of
//! the total variation distance, and the limit-side formulas in the critical
//! window `d ~ c n^3`.
//!
//! Monte Carlo work is expressed as a [`BlockPlan`]: a fixed partition of the
//! samples into blocks, each block driven by its own substream. Running the
//! blocks sequentially ([`run_sequential`]) or on any number of threads (the
//! `wglab` crate) produces bit-identical results as long as the partials are
//! merged in block order.
#![no_std]
#![warn(missing_docs)]
// `!(x > 0.0)` is the NaN-rejecting form used for argument checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod densities;
pub mod ensembles;
mod error;
pub mod limit_theory;
pub mod math;
pub mod plan;
pub mod quadrature;
pub mod rng;
pub mod special;
pub mod spectral;
pub mod stats;
pub mod tv_mc;

pub use error::{Error, Result};
pub use plan::{run_sequential, BlockPlan};
pub use rng::{NormalStream, RngState};
