//! Threaded Monte Carlo driver.
//!
//! Trials are cut into fixed blocks independent of the worker count, and
//! each trial owns its RNG stream, so the merged tally is the same for any
//! number of workers.

use hyrep_core::mcsim::{blocks, run_block, ChainModel, Tally};
use rayon::prelude::*;

use crate::error::CliResult;

pub const BLOCK_TRIALS: u64 = 1024;

pub fn run_trials(model: &ChainModel, trials: u64, seed: u64, workers: usize) -> CliResult<Tally> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers.max(1)).build()?;
    let parts: Vec<_> = pool.install(|| {
        blocks(trials, BLOCK_TRIALS).into_par_iter().map(|(s, e)| run_block(model, seed, s, e)).collect()
    });
    let mut total = Tally::default();
    for part in parts {
        total = total.merge(&part?)?;
    }
    Ok(total)
}

/// Order-preserving parallel map for sweeps.
pub fn map_ordered<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    items.par_iter().map(f).collect()
}
