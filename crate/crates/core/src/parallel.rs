//! Data-parallel map over index ranges.
//!
//! With the `parallel` feature the work is spread over a rayon pool; without
//! it the same closures run in a plain loop. Results are always returned in
//! index order, so output never depends on the worker count.

use crate::error::{Error, Result};

#[cfg(feature = "parallel")]
pub fn map_indexed<T, F>(len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..len).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_indexed<T, F>(len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..len).map(f).collect()
}

/// Fallible variant; the first error in index order wins.
pub fn try_map_indexed<T, F>(len: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    map_indexed(len, f).into_iter().collect()
}

/// Runs `op` on a dedicated pool of `workers` threads (`None` keeps the global pool).
#[cfg(feature = "parallel")]
pub fn with_workers<R, OP>(workers: Option<usize>, op: OP) -> Result<R>
where
    R: Send,
    OP: FnOnce() -> R + Send,
{
    match workers {
        None => Ok(op()),
        Some(0) => Err(Error::InvalidArgument(
            "worker count must be at least 1".into(),
        )),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::InvalidArgument(format!("cannot start thread pool: {e}")))?;
            Ok(pool.install(op))
        }
    }
}

#[cfg(not(feature = "parallel"))]
pub fn with_workers<R, OP>(workers: Option<usize>, op: OP) -> Result<R>
where
    R: Send,
    OP: FnOnce() -> R + Send,
{
    if workers == Some(0) {
        return Err(Error::InvalidArgument(
            "worker count must be at least 1".into(),
        ));
    }
    Ok(op())
}

pub fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved() {
        let out = with_workers(Some(3), || map_indexed(100, |i| i * i)).unwrap();
        assert_eq!(out, (0..100).map(|i| i * i).collect::<Vec<_>>());
    }

    #[test]
    fn first_error_in_index_order() {
        let res: Result<Vec<usize>> = try_map_indexed(10, |i| {
            if i % 4 == 3 {
                Err(Error::InvalidArgument(format!("{i}")))
            } else {
                Ok(i)
            }
        });
        assert_eq!(res, Err(Error::InvalidArgument("3".into())));
    }

    #[test]
    fn zero_workers_rejected() {
        assert!(with_workers(Some(0), || ()).is_err());
    }
}
