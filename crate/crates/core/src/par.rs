//! Block-partitioned parallel sweeps over program index ranges.

use rayon::prelude::*;

/// Programs handed to a worker at a time.
pub const BLOCK: u64 = 1 << 12;

/// Splits `0..total` into fixed-size blocks, maps each block on a pool of
/// `jobs` threads and returns the per-block results in block order.
///
/// Block boundaries depend only on `total`, so any merge that is
/// order-insensitive (or folds the returned vector in order) yields the same
/// answer for every `jobs`.
pub fn map_blocks<R, F>(total: u64, jobs: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(std::ops::Range<u64>) -> R + Sync + Send,
{
    let blocks: Vec<std::ops::Range<u64>> = (0..total.div_ceil(BLOCK))
        .map(|b| b * BLOCK..((b + 1) * BLOCK).min(total))
        .collect();
    if jobs <= 1 || blocks.len() <= 1 {
        return blocks.into_iter().map(f).collect();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
        Ok(pool) => pool.install(|| blocks.into_par_iter().map(&f).collect()),
        Err(_) => blocks.into_iter().map(f).collect(),
    }
}

pub fn available_jobs() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}
