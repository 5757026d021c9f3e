//! Execution strategy for the data-parallel loops.
//!
//! With the `parallel` feature (default) work is spread over rayon's pool.
//! Without it, or with [`Execution::Sequential`], the same closures run in
//! order on the calling thread. Results are collected in input order, and
//! reductions always use the same fixed chunking, so both strategies produce
//! identical bits.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

/// Fixed chunk length for ordered reductions over large index ranges.
pub const REDUCE_CHUNK: usize = 512;

impl Execution {
    /// Maps `f` over `0..n`, returning results in index order.
    pub fn map_range<R, F>(self, n: usize, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel => (0..n).into_par_iter().map(f).collect(),
            _ => (0..n).map(f).collect(),
        }
    }

    /// Splits `0..n` into [`REDUCE_CHUNK`]-sized ranges, maps each range with
    /// `f`, and returns the partial results in range order.
    pub fn map_chunks<R, F>(self, n: usize, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(std::ops::Range<usize>) -> R + Sync + Send,
    {
        let chunks = n.div_ceil(REDUCE_CHUNK);
        self.map_range(chunks, |c| {
            let start = c * REDUCE_CHUNK;
            f(start..(start + REDUCE_CHUNK).min(n))
        })
    }
}
