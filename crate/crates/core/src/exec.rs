//! Execution strategy for the data-parallel loops.
//!
//! With the `parallel` feature (on by default) [`Exec::Parallel`] runs on the
//! rayon pool; without it every strategy degrades to a plain sequential loop.
//! Results never depend on the strategy: each work item is a pure function of
//! its index, and outputs are collected in index order.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    Parallel,
}

impl Default for Exec {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Exec::Parallel
        } else {
            Exec::Sequential
        }
    }
}

impl Exec {
    /// Evaluates `f(0), ..., f(n - 1)` and returns the results in order.
    pub fn map_range<U, F>(self, n: usize, f: F) -> Vec<U>
    where
        U: Send,
        F: Fn(usize) -> U + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => (0..n).into_par_iter().map(f).collect(),
            _ => (0..n).map(f).collect(),
        }
    }

    /// Maps `f` over `items` in chunks of `chunk` elements. `f` receives the
    /// index of the first element of its chunk.
    pub fn map_chunks<T, U, F>(self, items: &[T], chunk: usize, f: F) -> Vec<U>
    where
        T: Sync,
        U: Send,
        F: Fn(usize, &[T]) -> U + Sync + Send,
    {
        let chunk = chunk.max(1);
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => items
                .par_chunks(chunk)
                .enumerate()
                .map(|(c, xs)| f(c * chunk, xs))
                .collect(),
            _ => items
                .chunks(chunk)
                .enumerate()
                .map(|(c, xs)| f(c * chunk, xs))
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strategies_agree() {
        let xs: Vec<u64> = (0..1000).collect();
        let seq = Exec::Sequential.map_chunks(&xs, 7, |start, c| (start, c.iter().sum::<u64>()));
        let par = Exec::Parallel.map_chunks(&xs, 7, |start, c| (start, c.iter().sum::<u64>()));
        assert_eq!(seq, par);
        assert_eq!(
            Exec::Sequential.map_range(50, |i| i * i),
            Exec::Parallel.map_range(50, |i| i * i)
        );
    }
}
