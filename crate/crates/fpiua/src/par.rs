//! Data-parallel sweeps with a sequential fallback.
//!
//! The verification workloads are embarrassingly parallel over boxes or
//! grid points. With the `parallel` feature (default) they run on rayon;
//! without it, or when [`ExecMode::Sequential`] is requested, they run on a
//! plain iterator. Results are order-stable either way.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExecMode {
    Sequential,
    /// Rayon when compiled in; otherwise falls back to sequential.
    Parallel,
}

impl ExecMode {
    pub fn from_env() -> ExecMode {
        match std::env::var("FPIUA_THREADS") {
            Ok(v) if v.trim() == "1" => ExecMode::Sequential,
            _ => ExecMode::Parallel,
        }
    }
}

/// Map `f` over `0..n`, preserving index order in the output.
pub fn map_indexed<R, F>(mode: ExecMode, n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if mode == ExecMode::Parallel {
            return (0..n).into_par_iter().map(f).collect();
        }
    }
    let _ = mode;
    (0..n).map(f).collect()
}

/// First index in `0..n` where `f` returns `Some`, with its value; `None`
/// when every call returns `None`. Deterministic: the smallest such index.
pub fn find_first<R, F>(mode: ExecMode, n: usize, f: F) -> Option<(usize, R)>
where
    R: Send,
    F: Fn(usize) -> Option<R> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if mode == ExecMode::Parallel {
            return (0..n)
                .into_par_iter()
                .filter_map(|i| f(i).map(|r| (i, r)))
                .min_by_key(|(i, _)| *i);
        }
    }
    let _ = mode;
    (0..n).find_map(|i| f(i).map(|r| (i, r)))
}

/// Count of indices in `0..n` where `pred` holds.
pub fn count_where<F>(mode: ExecMode, n: usize, pred: F) -> usize
where
    F: Fn(usize) -> bool + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if mode == ExecMode::Parallel {
            return (0..n).into_par_iter().filter(|&i| pred(i)).count();
        }
    }
    let _ = mode;
    (0..n).filter(|&i| pred(i)).count()
}
