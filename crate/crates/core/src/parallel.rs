//! Thin dispatch layer between the rayon data-parallel paths and the
//! sequential fallback used when the `parallel` feature is disabled.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Map over a slice, in parallel when enabled. Output order matches input
/// order either way, so results are deterministic.
pub fn map_slice<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// Sequential map, always available; the benchmark baseline.
pub fn map_slice_seq<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}
