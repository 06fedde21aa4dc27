//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature (default) these dispatch to rayon; without it
//! they are plain loops. Results are always collected in index order, so
//! output never depends on scheduling.

macro_rules! if_rayon {
    ($rayon_value: expr, $else_value: expr) => {{
        #[cfg(feature = "parallel")]
        {
            ($rayon_value)
        }
        #[cfg(not(feature = "parallel"))]
        {
            ($else_value)
        }
    }};
}

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// `(0..n).map(f).collect()`, possibly in parallel.
pub fn map_range<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    if_rayon!(
        (0..n).into_par_iter().map(f).collect(),
        (0..n).map(f).collect()
    )
}

/// Apply `f(row_index, row)` to consecutive `width`-sized chunks of `data`.
pub fn for_each_row_mut<T, F>(data: &mut [T], width: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    if width == 0 {
        return;
    }
    if_rayon!(
        data.par_chunks_mut(width)
            .enumerate()
            .for_each(|(i, row)| f(i, row)),
        data.chunks_mut(width)
            .enumerate()
            .for_each(|(i, row)| f(i, row))
    )
}

/// Size the global pool. Returns false when the pool was already built or the
/// crate was compiled without the `parallel` feature.
pub fn init_threads(threads: usize) -> bool {
    if_rayon!(
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .is_ok(),
        {
            let _ = threads;
            false
        }
    )
}

pub fn current_threads() -> usize {
    if_rayon!(rayon::current_num_threads(), 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_range_preserves_order() {
        let v = map_range(1000, |i| i * i);
        assert!(v.iter().enumerate().all(|(i, &x)| x == i * i));
    }

    #[test]
    fn rows_see_their_index() {
        let mut data = vec![0usize; 12];
        for_each_row_mut(&mut data, 4, |i, row| row.iter_mut().for_each(|x| *x = i));
        assert_eq!(data, vec![0, 0, 0, 0, 1, 1, 1, 1, 2, 2, 2, 2]);
    }
}
