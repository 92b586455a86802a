//! Execution strategy for data-parallel kernels.
//!
//! With the `parallel` feature (default), hot loops run on rayon; the
//! `force_sequential` switch lets benchmarks compare both code paths in a
//! single binary. Without the feature the sequential path is the only one.

use std::sync::atomic::{AtomicBool, Ordering};

static FORCE_SEQUENTIAL: AtomicBool = AtomicBool::new(false);

/// Globally disables (or re-enables) the rayon path at runtime.
pub fn set_force_sequential(v: bool) {
    FORCE_SEQUENTIAL.store(v, Ordering::Relaxed);
}

pub fn is_sequential() -> bool {
    !cfg!(feature = "parallel") || FORCE_SEQUENTIAL.load(Ordering::Relaxed)
}

/// Maps `f` over `items`, in parallel when enabled.
pub fn par_map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if !is_sequential() {
            use rayon::prelude::*;
            return items.par_iter().map(&f).collect();
        }
    }
    items.iter().map(&f).collect()
}

/// Maps `f` over an index range, in parallel when enabled.
pub fn par_map_range<U, F>(n: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if !is_sequential() {
            use rayon::prelude::*;
            return (0..n).into_par_iter().map(&f).collect();
        }
    }
    (0..n).map(&f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_matches_sequential() {
        let xs: Vec<u64> = (0..100).collect();
        let sq = |x: &u64| x * x;
        let par = par_map(&xs, sq);
        set_force_sequential(true);
        let seq = par_map(&xs, sq);
        set_force_sequential(false);
        assert_eq!(par, seq);
        assert_eq!(par[7], 49);
        assert_eq!(par_map_range(5, |i| i + 1), vec![1, 2, 3, 4, 5]);
    }
}
