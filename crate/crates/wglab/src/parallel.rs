//! Multi-threaded execution of [`BlockPlan`]s.
//!
//! Blocks are farmed out to a rayon pool and their partials collected back in
//! block order before the plan merges them, so the output is the same as
//! [`wglab_core::run_sequential`] for any worker count.

use std::env;
use std::num::NonZeroUsize;
use std::thread;

use rayon::prelude::*;
use rayon::{ThreadPool, ThreadPoolBuilder};
use wglab_core::BlockPlan;

use crate::error::{Error, Result};

/// Environment variable that overrides the worker count everywhere.
pub const WORKERS_ENV: &str = "WGLAB_WORKERS";

/// Parses `WGLAB_WORKERS`, if set.
pub fn workers_from_env() -> Result<Option<usize>> {
    match env::var(WORKERS_ENV) {
        Ok(v) => parse_workers(&v).map(Some),
        Err(env::VarError::NotPresent) => Ok(None),
        Err(env::VarError::NotUnicode(_)) => {
            Err(Error::config(format!("{WORKERS_ENV} is not valid unicode")))
        }
    }
}

fn parse_workers(v: &str) -> Result<usize> {
    match v.trim().parse::<usize>() {
        Ok(w) if w >= 1 => Ok(w),
        _ => Err(Error::config(format!(
            "{WORKERS_ENV} must be an integer >= 1, got {v:?}"
        ))),
    }
}

/// Number of hardware threads, at least 1.
pub fn default_workers() -> usize {
    thread::available_parallelism().map_or(1, NonZeroUsize::get)
}

/// A fixed-size worker pool.
pub struct Runner {
    pool: ThreadPool,
    workers: usize,
}

impl Runner {
    /// Pool with exactly `workers` threads.
    pub fn new(workers: usize) -> Result<Self> {
        if workers == 0 {
            return Err(Error::config("workers must be at least 1"));
        }
        let pool = ThreadPoolBuilder::new()
            .num_threads(workers)
            .thread_name(|i| format!("wglab-worker-{i}"))
            .build()?;
        Ok(Self { pool, workers })
    }

    /// `WGLAB_WORKERS` if set, otherwise `fallback`.
    pub fn from_env_or(fallback: usize) -> Result<Self> {
        Self::new(workers_from_env()?.unwrap_or(fallback))
    }

    /// Thread count.
    pub fn workers(&self) -> usize {
        self.workers
    }

    /// Runs every block of `plan` and merges the partials in block order.
    pub fn run<P: BlockPlan>(&self, plan: &P) -> Result<P::Output> {
        let partials = self.pool.install(|| {
            (0..plan.block_count())
                .into_par_iter()
                .map(|b| plan.run_block(b))
                .collect::<wglab_core::Result<Vec<_>>>()
        })?;
        Ok(plan.finish(partials))
    }
}

impl std::fmt::Debug for Runner {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Runner")
            .field("workers", &self.workers)
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use wglab_core::limit_theory::{CltPlan, LimitMcPlan, LimitParams, PairSampler};
    use wglab_core::tv_mc::{Side, TvPlan};
    use wglab_core::{run_sequential, RngState};

    #[test]
    fn matches_sequential_for_any_worker_count() {
        let tv = TvPlan::new(3, 20, 5000, Side::Goe, RngState::new(5)).unwrap();
        let clt = CltPlan::new(6, 50, RngState::new(6)).unwrap();
        let lim = LimitMcPlan::new(
            LimitParams::new(0.5).unwrap(),
            4000,
            RngState::new(7),
            PairSampler::Decoupled,
        )
        .unwrap();
        let tv_seq = run_sequential(&tv).unwrap();
        let clt_seq = run_sequential(&clt).unwrap();
        let lim_seq = run_sequential(&lim).unwrap();
        for w in [1, 2, 3, 7] {
            let r = Runner::new(w).unwrap();
            assert_eq!(r.run(&tv).unwrap(), tv_seq);
            assert_eq!(r.run(&clt).unwrap(), clt_seq);
            assert_eq!(r.run(&lim).unwrap(), lim_seq);
        }
    }

    #[test]
    fn worker_parsing() {
        assert_eq!(parse_workers(" 4 ").unwrap(), 4);
        assert!(parse_workers("0").is_err());
        assert!(parse_workers("-1").is_err());
        assert!(parse_workers("many").is_err());
        assert!(Runner::new(0).is_err());
    }
}
