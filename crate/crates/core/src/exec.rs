//! Execution policy for the data-parallel loops (validation cubes, Verlinde
//! sums, spectra, case tables).
//!
//! With the `parallel` feature the [`Exec::Parallel`] policy runs on rayon's
//! global pool; without it every policy runs sequentially. Results are always
//! returned in index order, so output is identical under both policies.

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
    /// `(0..n).map(f)` collected in order.
    pub fn map<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => (0..n).into_par_iter().map(f).collect(),
            _ => (0..n).map(f).collect(),
        }
    }

    /// `items.iter().map(f)` collected in order.
    pub fn map_slice<I, T, F>(self, items: &[I], f: F) -> Vec<T>
    where
        I: Sync,
        T: Send,
        F: Fn(&I) -> T + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => items.par_iter().map(f).collect(),
            _ => items.iter().map(f).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn policies_agree() {
        let f = |i: usize| (i * i) % 7;
        assert_eq!(Exec::Sequential.map(100, f), Exec::Parallel.map(100, f));
        let xs: Vec<u32> = (0..50).collect();
        assert_eq!(
            Exec::Sequential.map_slice(&xs, |x| x + 1),
            Exec::Parallel.map_slice(&xs, |x| x + 1)
        );
    }
}
