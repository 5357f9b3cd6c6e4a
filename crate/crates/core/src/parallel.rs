//! Chunked execution over an integer range, parallel when the `parallel`
//! feature is enabled and [`Execution::Parallel`] is requested.
//!
//! Results are always returned in chunk order, so callers that merge them
//! with a total order get output independent of the thread count.

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// Whether work will actually be spread over threads in this build.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// Split `lo..=hi` into contiguous chunks and map each one.
pub(crate) fn map_chunks<T, F>(lo: i64, hi: i64, execution: Execution, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(i64, i64) -> T + Sync + Send,
{
    if hi < lo {
        return Vec::new();
    }
    let len = (hi - lo + 1) as u64;
    if !execution.is_parallel() || len < 2 {
        return vec![f(lo, hi)];
    }
    run_parallel(lo, hi, len, f)
}

#[cfg(feature = "parallel")]
fn run_parallel<T, F>(lo: i64, hi: i64, len: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(i64, i64) -> T + Sync + Send,
{
    use rayon::prelude::*;

    let chunks = (rayon::current_num_threads() as u64 * 8).clamp(1, len);
    let step = len.div_ceil(chunks);
    let bounds: Vec<(i64, i64)> = (0..chunks)
        .map(|c| {
            let a = lo + (c * step) as i64;
            let b = (a + step as i64 - 1).min(hi);
            (a, b)
        })
        .filter(|(a, b)| a <= b)
        .collect();
    bounds.into_par_iter().map(|(a, b)| f(a, b)).collect()
}

#[cfg(not(feature = "parallel"))]
fn run_parallel<T, F>(lo: i64, hi: i64, _len: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(i64, i64) -> T + Sync + Send,
{
    vec![f(lo, hi)]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chunks_cover_the_range_in_order() {
        for exec in [Execution::Sequential, Execution::Parallel] {
            let parts = map_chunks(-7, 100, exec, |a, b| (a..=b).collect::<Vec<_>>());
            let flat: Vec<i64> = parts.into_iter().flatten().collect();
            assert_eq!(flat, (-7..=100).collect::<Vec<_>>());
        }
        assert!(map_chunks(3, 2, Execution::Parallel, |a, b| (a, b)).is_empty());
    }
}
