//! Replicate runner: rayon data-parallel by default, sequential fallback
//! when the `parallel` feature is off. Both paths produce replicate `i` in
//! slot `i`, so results are identical regardless of scheduling.
//!
//! [`map_replicates_seq`] is always available; the bench suite uses it as
//! the single-threaded baseline against the rayon path.

use crate::Result;

/// Run `f(0..reps)` and collect results in replicate order.
///
/// `workers` is a hint: `Some(w)` runs inside a dedicated `w`-thread pool,
/// `None` uses the global pool. It has no effect on the values produced.
#[cfg(feature = "parallel")]
pub fn map_replicates<T, F>(reps: usize, workers: Option<usize>, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    use rayon::prelude::*;

    match workers {
        Some(w) if w > 0 => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .map_err(|e| crate::Error::NumericalFailure(format!("thread pool: {e}")))?;
            pool.install(|| (0..reps).into_par_iter().map(&f).collect())
        }
        _ => (0..reps).into_par_iter().map(&f).collect(),
    }
}

#[cfg(not(feature = "parallel"))]
pub fn map_replicates<T, F>(reps: usize, _workers: Option<usize>, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    map_replicates_seq(reps, f)
}

/// Sequential path, always available (benchmarking baseline).
pub fn map_replicates_seq<T, F>(reps: usize, f: F) -> Result<Vec<T>>
where
    F: Fn(usize) -> Result<T>,
{
    (0..reps).map(f).collect()
}
