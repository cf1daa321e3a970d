//! Order-preserving map over independent work items, run on the rayon pool
//! when the `parallel` feature is enabled and sequentially otherwise.
//!
//! Callers always reduce the returned vector left to right, so results do not
//! depend on the execution mode.

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// Whether `Parallel` actually runs on a thread pool in this build.
    pub const fn parallel_available() -> bool {
        cfg!(feature = "parallel")
    }
}

/// Below this many items the parallel path is not worth the scheduling cost.
#[cfg_attr(not(feature = "parallel"), allow(dead_code))]
const MIN_PARALLEL_ITEMS: usize = 64;

pub fn map<T, R, F>(mode: Execution, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    match mode {
        #[cfg(feature = "parallel")]
        Execution::Parallel if items.len() >= MIN_PARALLEL_ITEMS => {
            use rayon::prelude::*;
            items.par_iter().with_min_len(MIN_PARALLEL_ITEMS / 4).map(f).collect()
        }
        _ => items.iter().map(f).collect(),
    }
}

/// Like [`map`] but without the small-input cutoff, for coarse tasks.
pub fn map_coarse<T, R, F>(mode: Execution, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    match mode {
        #[cfg(feature = "parallel")]
        Execution::Parallel if items.len() > 1 => {
            use rayon::prelude::*;
            items.par_iter().map(f).collect()
        }
        _ => items.iter().map(f).collect(),
    }
}
