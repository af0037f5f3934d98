//! Data-parallel helpers. With the `parallel` feature these run on the rayon
//! pool; without it they are plain sequential loops. Outputs are always in
//! index order, and reductions go through [`ordered_sum`] so results do not
//! depend on the number of worker threads.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Index maps are split into chunks of at least this many items; they are
/// mostly cheap per-node or per-entry work.
#[cfg(feature = "parallel")]
const MIN_CHUNK: usize = 256;

/// `(0..n).map(f).collect()`, possibly in parallel.
pub fn map_range<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().with_min_len(MIN_CHUNK).map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// `items.iter().map(f).collect()`, possibly in parallel.
pub fn map_slice<S, T, F>(items: &[S], f: F) -> Vec<T>
where
    S: Sync,
    T: Send,
    F: Fn(&S) -> T + Sync + Send,
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

/// Fill disjoint row chunks of `out` in place.
pub fn for_each_row<T, F>(out: &mut [T], row_len: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        out.par_chunks_mut(row_len).enumerate().for_each(|(r, row)| f(r, row));
    }
    #[cfg(not(feature = "parallel"))]
    {
        out.chunks_mut(row_len).enumerate().for_each(|(r, row)| f(r, row));
    }
}

/// Pairwise summation in a fixed tree order.
pub fn ordered_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        n if n <= 8 => values.iter().fold(0.0, |a, &b| a + b),
        n => {
            let (l, r) = values.split_at(n / 2);
            ordered_sum(l) + ordered_sum(r)
        }
    }
}

/// Max that propagates NaN instead of skipping it.
pub fn ordered_max(values: &[f64]) -> f64 {
    values.iter().fold(f64::NEG_INFINITY, |a, &b| if b.is_nan() || b > a { b } else { a })
}

/// Run `f` on a dedicated pool of `threads` workers (`None`: the global pool).
/// Without the `parallel` feature this just calls `f`.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> crate::Result<T> {
    #[cfg(feature = "parallel")]
    {
        match threads {
            None => Ok(f()),
            Some(n) => {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(n.max(1))
                    .build()
                    .map_err(|e| crate::Error::Usage(format!("cannot build a {n}-thread pool: {e}")))?;
                Ok(pool.install(f))
            }
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = threads;
        Ok(f())
    }
}
