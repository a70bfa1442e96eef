// SPDX-License-Identifier: Apache-2.0

//! Execution strategy for the data-parallel loops (Monte Carlo averaging,
//! share screening, query-game root fan-out).
//!
//! With the `parallel` feature disabled every strategy runs sequentially.
//! Results never depend on the strategy: work is split into fixed chunks
//! and merged in index order.

/// How a data-parallel loop is scheduled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parallelism {
    Sequential,
    Parallel,
}

impl Default for Parallelism {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Parallelism::Parallel
        } else {
            Parallelism::Sequential
        }
    }
}

impl Parallelism {
    /// Maps `f` over `items`, preserving order.
    pub fn map<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Parallelism::Parallel => {
                use rayon::prelude::*;
                items.par_iter().map(f).collect()
            }
            _ => items.iter().map(f).collect(),
        }
    }

    /// Maps `f` over `0..count`, preserving order.
    pub fn map_range<R, F>(self, count: usize, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Parallelism::Parallel => {
                use rayon::prelude::*;
                (0..count).into_par_iter().map(f).collect()
            }
            _ => (0..count).map(f).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strategies_agree() {
        let xs: Vec<u64> = (0..1000).collect();
        let a = Parallelism::Sequential.map(&xs, |x| x * x);
        let b = Parallelism::Parallel.map(&xs, |x| x * x);
        assert_eq!(a, b);
        assert_eq!(
            Parallelism::Sequential.map_range(17, |i| i + 1),
            Parallelism::Parallel.map_range(17, |i| i + 1)
        );
    }
}
