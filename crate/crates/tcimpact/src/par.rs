//! Data-parallel map helpers.
//!
//! Every hot loop in the crate (Monte-Carlo replications, per-storm wind
//! fields, per-region tests, null-distribution builds) funnels through these
//! two functions. With the `parallel` feature they dispatch to rayon; without
//! it they run sequentially with the same signatures. Results are collected
//! in input order and reduced sequentially by callers, so output bytes do not
//! depend on the feature or the thread count.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Map `f` over `0..n`, preserving index order.
pub(crate) fn map_indexed<O, F>(n: usize, f: F) -> Vec<O>
where
    O: Send,
    F: Fn(usize) -> O + Sync + Send,
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

/// Map `f` over a slice, preserving element order.
pub(crate) fn map_slice<I, O, F>(items: &[I], f: F) -> Vec<O>
where
    I: Sync,
    O: Send,
    F: Fn(&I) -> O + Sync + Send,
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
