//! Thin wrappers over the data-parallel inner loops.
//!
//! With the `parallel` feature the loops run on rayon; without it they run
//! sequentially. Callers must only use order-independent reductions so both
//! builds (and any worker count) produce identical results.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Map `f` over `0..n`, preserving index order in the output.
pub(crate) fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Fold `0..n` into per-worker accumulators and merge them.
///
/// `fold` may reuse scratch space owned by the accumulator; `merge` must be
/// associative and commutative for determinism across schedules.
pub(crate) fn fold_reduce<A, F, M>(n: usize, init: impl Fn() -> A + Sync + Send, fold: F, merge: M) -> A
where
    A: Send,
    F: Fn(A, usize) -> A + Sync + Send,
    M: Fn(A, A) -> A + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n)
            .into_par_iter()
            .fold(&init, &fold)
            .reduce(&init, &merge)
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = merge;
        (0..n).fold(init(), fold)
    }
}
