//! Data-parallel map with a sequential fallback.
//!
//! With the `parallel` feature (default) independent tasks fan out over the
//! rayon pool; without it the same code runs on one thread. Results are
//! always collected in task-index order, so reductions downstream are
//! identical either way.

#[cfg(feature = "parallel")]
pub(crate) fn par_map_indexed<T, F>(count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..count).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn par_map_indexed<T, F>(count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..count).map(f).collect()
}
