//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature the helpers dispatch to rayon; without it
//! they run the same closures in a plain loop. Reductions always split the
//! input into fixed-size chunks and combine the partial results in chunk
//! order, so every result is independent of the thread count.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Chunk length used by the deterministic reductions.
pub const REDUCE_CHUNK: usize = 4096;

/// `(0..n).map(f).collect()`, possibly in parallel. Output order is the index order.
pub fn map_range<T, F>(n: usize, f: F) -> Vec<T>
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

/// Applies `f(index, item)` to every element of `items`.
pub fn for_each_mut<T, F>(items: &mut [T], f: F)
where
    T: Send,
    F: Fn(usize, &mut T) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter_mut().enumerate().for_each(|(i, t)| f(i, t));
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter_mut().enumerate().for_each(|(i, t)| f(i, t));
    }
}

/// Applies `f(chunk_index, chunk)` to consecutive chunks of length `chunk`.
pub fn for_each_chunk_mut<T, F>(items: &mut [T], chunk: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items
            .par_chunks_mut(chunk)
            .enumerate()
            .for_each(|(i, c)| f(i, c));
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.chunks_mut(chunk).enumerate().for_each(|(i, c)| f(i, c));
    }
}

/// Deterministic sum of `f(i)` over `0..n`.
pub fn sum_range<F>(n: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    let n_chunks = n.div_ceil(REDUCE_CHUNK);
    let partial = map_range(n_chunks, |c| {
        let lo = c * REDUCE_CHUNK;
        let hi = (lo + REDUCE_CHUNK).min(n);
        (lo..hi).map(&f).sum::<f64>()
    });
    partial.into_iter().sum()
}

/// Accumulates per-chunk buffers of length `len` and merges them in chunk
/// order. `fill(range, buffer)` adds the contribution of items in `range`.
pub fn accumulate<F>(n: usize, len: usize, fill: F) -> Vec<f64>
where
    F: Fn(std::ops::Range<usize>, &mut [f64]) + Sync + Send,
{
    let n_chunks = n.div_ceil(REDUCE_CHUNK);
    let partial = map_range(n_chunks, |c| {
        let lo = c * REDUCE_CHUNK;
        let hi = (lo + REDUCE_CHUNK).min(n);
        let mut buf = vec![0.0; len];
        fill(lo..hi, &mut buf);
        buf
    });
    let mut out = vec![0.0; len];
    for buf in partial {
        for (o, b) in out.iter_mut().zip(buf) {
            *o += b;
        }
    }
    out
}

/// Maximum of `f(i)` over `0..n` (`f64::NEG_INFINITY` when `n == 0`).
pub fn max_range<F>(n: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    map_range(n, f).into_iter().fold(f64::NEG_INFINITY, f64::max)
}

/// Runs `op` inside a pool with `threads` workers. Without the `parallel`
/// feature this just calls `op`.
pub fn with_threads<R: Send>(threads: usize, op: impl FnOnce() -> R + Send) -> R {
    #[cfg(feature = "parallel")]
    {
        match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
            Ok(pool) => pool.install(op),
            Err(_) => op(),
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = threads;
        op()
    }
}

/// Sets the global worker count. Returns false when the pool was already
/// initialised or parallelism is compiled out.
pub fn init_global_threads(threads: usize) -> bool {
    #[cfg(feature = "parallel")]
    {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .is_ok()
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = threads;
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sum_is_thread_count_independent() {
        let f = |i: usize| ((i as f64) * 0.37).sin() * 1e3;
        let a = with_threads(1, || sum_range(50_000, f));
        let b = with_threads(4, || sum_range(50_000, f));
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn accumulate_merges_in_order() {
        let out = accumulate(10_000, 3, |r, buf| {
            for i in r {
                buf[i % 3] += 1.0;
            }
        });
        assert_eq!(out, vec![3334.0, 3333.0, 3333.0]);
    }
}
