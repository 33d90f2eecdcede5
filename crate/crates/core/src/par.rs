//! Data-parallel map with a sequential fallback.
//!
//! The `parallel` feature (on by default) routes batch work — scanline
//! synthesis, duty sweeps, M-mode envelopes — through rayon. With the
//! feature off the same call sites run a plain sequential map. Both paths
//! must produce bit-identical output: anything order-sensitive (RNG state,
//! accumulated time) is derived per element, never threaded through the
//! iteration.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Map `f` over `items`, in parallel when the `parallel` feature is enabled.
/// Output order always matches input order.
#[cfg(feature = "parallel")]
pub fn map_slice<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_slice<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}

/// Sequential map with the same signature, kept available under both
/// feature configurations so benchmarks can compare the two paths directly.
pub fn map_slice_seq<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}

/// Map over a slice producing `Result`s, failing fast on the first error
/// (by input order, so the reported error is deterministic).
pub fn try_map_slice<T, U, F>(items: &[T], f: F) -> crate::Result<Vec<U>>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> crate::Result<U> + Sync + Send,
{
    let results = map_slice(items, f);
    results.into_iter().collect()
}
