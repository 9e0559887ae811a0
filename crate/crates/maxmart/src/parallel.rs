//! Deterministic parallel reduction over path indices.
//!
//! Rayon's own `reduce` shapes its tree after work stealing, which reorders
//! floating-point sums between runs. Here paths are split into fixed chunks;
//! each chunk folds sequentially in index order, chunk results are collected
//! in chunk order, and the final combine runs serially. The result is
//! bit-identical for every thread count.

use rayon::prelude::*;

/// Paths per chunk. Large enough to amortize scheduling, small enough to
/// load-balance stopped-path workloads on a few cores.
pub const CHUNK: u64 = 256;

/// Fold `f` over path indices 0..n into per-chunk accumulators, then merge
/// the chunk accumulators in index order.
pub fn fold_paths<T, F, M>(n_paths: u64, init: T, fold: F, merge: M) -> T
where
    T: Clone + Send + Sync,
    F: Fn(T, u64) -> T + Sync,
    M: Fn(T, T) -> T,
{
    let n_chunks = n_paths.div_ceil(CHUNK);
    let partials: Vec<T> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * CHUNK;
            let hi = ((c + 1) * CHUNK).min(n_paths);
            let mut acc = init.clone();
            for i in lo..hi {
                acc = fold(acc, i);
            }
            acc
        })
        .collect();
    partials.into_iter().fold(init, merge)
}

/// Map every path index to a value, preserving index order.
pub fn map_paths<T, F>(n_paths: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync,
{
    let n_chunks = n_paths.div_ceil(CHUNK);
    let chunks: Vec<Vec<T>> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * CHUNK;
            let hi = ((c + 1) * CHUNK).min(n_paths);
            (lo..hi).map(&f).collect()
        })
        .collect();
    chunks.into_iter().flatten().collect()
}
