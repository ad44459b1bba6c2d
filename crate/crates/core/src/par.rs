//! Data-parallel helpers.
//!
//! With the `parallel` feature the `Parallel` strategy dispatches to rayon;
//! without it every strategy runs sequentially.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Execution {
    #[default]
    Parallel,
    Sequential,
}

impl Execution {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

#[cfg(feature = "parallel")]
pub fn map_range<R, F>(exec: Execution, range: std::ops::Range<usize>, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    match exec {
        Execution::Parallel => range.into_par_iter().map(f).collect(),
        Execution::Sequential => range.map(f).collect(),
    }
}

#[cfg(not(feature = "parallel"))]
pub fn map_range<R, F>(_exec: Execution, range: std::ops::Range<usize>, f: F) -> Vec<R>
where
    F: Fn(usize) -> R,
{
    range.map(f).collect()
}

#[cfg(feature = "parallel")]
pub fn map_vec<T, R, F>(exec: Execution, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    match exec {
        Execution::Parallel => items.par_iter().map(f).collect(),
        Execution::Sequential => items.iter().map(f).collect(),
    }
}

#[cfg(not(feature = "parallel"))]
pub fn map_vec<T, R, F>(_exec: Execution, items: &[T], f: F) -> Vec<R>
where
    F: Fn(&T) -> R,
{
    items.iter().map(f).collect()
}

/// Apply `f(chunk_index, chunk)` to consecutive chunks of `data`.
#[cfg(feature = "parallel")]
pub fn for_each_chunk<T, F>(exec: Execution, data: &mut [T], chunk: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    match exec {
        Execution::Parallel => data
            .par_chunks_mut(chunk)
            .enumerate()
            .for_each(|(i, c)| f(i, c)),
        Execution::Sequential => data
            .chunks_mut(chunk)
            .enumerate()
            .for_each(|(i, c)| f(i, c)),
    }
}

#[cfg(not(feature = "parallel"))]
pub fn for_each_chunk<T, F>(_exec: Execution, data: &mut [T], chunk: usize, f: F)
where
    F: Fn(usize, &mut [T]),
{
    data.chunks_mut(chunk)
        .enumerate()
        .for_each(|(i, c)| f(i, c))
}

/// Sum of `f(i)` over the range.
#[cfg(feature = "parallel")]
pub fn sum_range<F>(exec: Execution, range: std::ops::Range<u64>, f: F) -> u64
where
    F: Fn(u64) -> u64 + Sync + Send,
{
    match exec {
        Execution::Parallel => range.into_par_iter().map(f).sum(),
        Execution::Sequential => range.map(f).sum(),
    }
}

#[cfg(not(feature = "parallel"))]
pub fn sum_range<F>(_exec: Execution, range: std::ops::Range<u64>, f: F) -> u64
where
    F: Fn(u64) -> u64,
{
    range.map(f).sum()
}
