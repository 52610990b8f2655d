//! Order-preserving parallel map with a sequential fallback.
//!
//! With the `parallel` feature (default) the maps run on rayon; results are
//! collected in input order, so output bytes do not depend on the thread
//! count. Without the feature the same entry points run on plain iterators.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Map `f` over `items`, preserving input order in the output.
#[cfg(feature = "parallel")]
pub fn map_collect<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_collect<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}

/// Sequential map with the same shape as [`map_collect`]; the benchmark
/// suite uses it as the baseline the parallel path is compared against.
pub fn map_collect_seq<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}

/// Cap the global thread pool. Reads like `NEGASPEC_THREADS=4`; silently
/// keeps the default pool when the variable is absent, unparseable, or the
/// pool was already initialized. A no-op without the `parallel` feature.
pub fn init_threads_from_env() {
    #[cfg(feature = "parallel")]
    {
        if let Ok(v) = std::env::var("NEGASPEC_THREADS") {
            if let Ok(n) = v.trim().parse::<usize>() {
                if n >= 1 {
                    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
                }
            }
        }
    }
}
