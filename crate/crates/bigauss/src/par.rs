//! Execution-mode switch between rayon data parallelism and a sequential
//! fallback.
//!
//! Parameter sweeps (quantile tables, candidate enumerations, oracle grid
//! cells) are embarrassingly parallel over their inputs. With the
//! `parallel` feature enabled (the default) they fan out over rayon's
//! global pool; compiled without it, or with [`ExecMode::Sequential`]
//! selected at runtime, the same closures run on one thread in the same
//! order. Results are position-stable, so both modes produce identical
//! output byte for byte.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// How a sweep should execute.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExecMode {
    /// Fan out over the rayon thread pool. Falls back to sequential when
    /// the crate is built without the `parallel` feature.
    Parallel,
    /// Run on the calling thread.
    Sequential,
}

impl Default for ExecMode {
    fn default() -> ExecMode {
        if cfg!(feature = "parallel") {
            ExecMode::Parallel
        } else {
            ExecMode::Sequential
        }
    }
}

/// Applies `f` to every index in `0..n`, returning results in index order.
pub fn map_range<U, F>(mode: ExecMode, n: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if mode == ExecMode::Parallel {
        return (0..n).into_par_iter().map(f).collect();
    }
    let _ = mode;
    (0..n).map(f).collect()
}

/// Applies `f` to every element of `items`, returning results in input order.
pub fn map_slice<T, U, F>(mode: ExecMode, items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if mode == ExecMode::Parallel {
        return items.par_iter().map(f).collect();
    }
    let _ = mode;
    items.iter().map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::{map_range, map_slice, ExecMode};

    #[test]
    fn both_modes_agree_and_preserve_order() {
        let seq = map_range(ExecMode::Sequential, 100, |i| i * i);
        let par = map_range(ExecMode::Parallel, 100, |i| i * i);
        assert_eq!(seq, par);
        assert_eq!(seq[7], 49);

        let items: Vec<f64> = (0..50).map(|i| i as f64 / 7.0).collect();
        let seq = map_slice(ExecMode::Sequential, &items, |x| x.sin());
        let par = map_slice(ExecMode::Parallel, &items, |x| x.sin());
        assert_eq!(seq, par);
    }
}
