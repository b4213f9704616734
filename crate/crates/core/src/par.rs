//! Data-parallel kernels with a sequential fallback.
//!
//! With the `parallel` feature the loops below run on the rayon pool that is
//! current for the calling thread; without it they run in place. Reductions
//! use a fixed chunking so both builds produce bit-identical sums regardless
//! of the number of worker threads.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Reduction block size. Partial sums are formed per block and then added
/// left to right.
pub const SUM_CHUNK: usize = 4096;

macro_rules! if_parallel {
    ($par:expr, $seq:expr) => {{
        #[cfg(feature = "parallel")]
        {
            $par
        }
        #[cfg(not(feature = "parallel"))]
        {
            $seq
        }
    }};
}

/// `out[i] = f(i)` for every index.
pub fn fill<T, F>(out: &mut [T], f: F)
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    if_parallel!(
        out.par_iter_mut().enumerate().for_each(|(i, o)| *o = f(i)),
        out.iter_mut().enumerate().for_each(|(i, o)| *o = f(i))
    )
}

/// Collects `f(i)` for `i in 0..len`.
pub fn collect<T, F>(len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    if_parallel!(
        (0..len).into_par_iter().map(f).collect(),
        (0..len).map(f).collect()
    )
}

/// In-place update `x[i] = f(i, x[i])`.
pub fn update<T, F>(data: &mut [T], f: F)
where
    T: Send + Copy,
    F: Fn(usize, T) -> T + Sync + Send,
{
    if_parallel!(
        data.par_iter_mut()
            .enumerate()
            .for_each(|(i, x)| *x = f(i, *x)),
        data.iter_mut().enumerate().for_each(|(i, x)| *x = f(i, *x))
    )
}

/// Runs `f(chunk_index, chunk)` over consecutive chunks of length `size`.
pub fn for_each_chunk<T, F>(data: &mut [T], size: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    if_parallel!(
        data.par_chunks_mut(size)
            .enumerate()
            .for_each(|(i, c)| f(i, c)),
        data.chunks_mut(size).enumerate().for_each(|(i, c)| f(i, c))
    )
}

/// Deterministic sum of `f(i)` over `0..len`.
pub fn sum<F>(len: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    let blocks = len.div_ceil(SUM_CHUNK);
    let block_sum = |b: usize| {
        let start = b * SUM_CHUNK;
        let end = (start + SUM_CHUNK).min(len);
        (start..end).map(&f).sum::<f64>()
    };
    let partials: Vec<f64> = if_parallel!(
        (0..blocks).into_par_iter().map(block_sum).collect(),
        (0..blocks).map(block_sum).collect()
    );
    partials.into_iter().sum()
}

/// Deterministic maximum of `f(i)` over `0..len` (NaN-free inputs assumed).
pub fn max<F>(len: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    if_parallel!(
        (0..len)
            .into_par_iter()
            .map(f)
            .reduce(|| f64::NEG_INFINITY, f64::max),
        (0..len).map(f).fold(f64::NEG_INFINITY, f64::max)
    )
}
