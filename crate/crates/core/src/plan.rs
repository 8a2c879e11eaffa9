//! Block-partitioned Monte Carlo work.
//!
//! A plan splits its samples into blocks of [`BLOCK_SIZE`]; block `b` draws
//! from substream `b` of the plan's [`RngState`](crate::RngState). Partials
//! are always merged in block order, so any executor that returns them in
//! order reproduces the sequential result exactly.

use alloc::vec::Vec;
use core::ops::Range;

use crate::error::Result;

/// Samples per block.
pub const BLOCK_SIZE: u64 = 1024;

/// Number of blocks needed for `samples` draws.
pub fn block_count(samples: u64) -> u64 {
    samples.div_ceil(BLOCK_SIZE)
}

/// Global sample indices covered by `block`.
pub fn block_range(samples: u64, block: u64) -> Range<u64> {
    let start = block * BLOCK_SIZE;
    start..(start + BLOCK_SIZE).min(samples)
}

/// Work that can be run block by block, in any order, and merged in block
/// order.
pub trait BlockPlan: Sync {
    /// Result of one block.
    type Partial: Send;
    /// Merged result.
    type Output;

    /// Number of blocks.
    fn block_count(&self) -> u64;

    /// Runs one block.
    fn run_block(&self, block: u64) -> Result<Self::Partial>;

    /// Merges partials given in block order.
    fn finish(&self, partials: Vec<Self::Partial>) -> Self::Output;
}

/// Runs every block on the current thread.
pub fn run_sequential<P: BlockPlan>(plan: &P) -> Result<P::Output> {
    let partials = (0..plan.block_count())
        .map(|b| plan.run_block(b))
        .collect::<Result<Vec<_>>>()?;
    Ok(plan.finish(partials))
}
