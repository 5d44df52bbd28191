//! Order-preserving map over independent jobs, on a rayon pool when the
//! `parallel` feature is on and sequentially otherwise.

use crate::error::Result;

/// Applies `f` to every job and returns the results in input order.
/// `threads = Some(1)` always runs on the calling thread.
pub fn map<T, U, F>(jobs: Vec<T>, threads: Option<usize>, f: F) -> Result<Vec<U>>
where
    T: Send,
    U: Send,
    F: Fn(T) -> Result<U> + Send + Sync,
{
    if threads == Some(1) || jobs.len() <= 1 {
        return jobs.into_iter().map(f).collect();
    }
    parallel_map(jobs, threads, f)
}

#[cfg(feature = "parallel")]
fn parallel_map<T, U, F>(jobs: Vec<T>, threads: Option<usize>, f: F) -> Result<Vec<U>>
where
    T: Send,
    U: Send,
    F: Fn(T) -> Result<U> + Send + Sync,
{
    use rayon::prelude::*;
    let run = || jobs.into_par_iter().map(&f).collect::<Vec<_>>();
    let out = match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| crate::error::invalid(format!("thread pool: {e}")))?
            .install(run),
        None => run(),
    };
    out.into_iter().collect()
}

#[cfg(not(feature = "parallel"))]
fn parallel_map<T, U, F>(jobs: Vec<T>, _threads: Option<usize>, f: F) -> Result<Vec<U>>
where
    T: Send,
    U: Send,
    F: Fn(T) -> Result<U> + Send + Sync,
{
    jobs.into_iter().map(f).collect()
}

/// Whether this build can run jobs concurrently.
pub fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}
