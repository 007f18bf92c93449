//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature (on by default) the `Parallel` mode runs on the
//! rayon thread pool; without it every mode runs sequentially. Results are
//! always returned in input order, so parallel and sequential execution
//! produce identical output.

/// How an embarrassingly parallel sweep is executed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// Use up to this many worker threads (0 means the pool default).
    Parallel(usize),
}

impl Execution {
    /// Maps a worker-count knob onto an execution mode: 1 is sequential.
    pub fn from_workers(workers: usize) -> Self {
        if workers == 1 {
            Execution::Sequential
        } else {
            Execution::Parallel(workers)
        }
    }

    pub fn is_parallel_available() -> bool {
        cfg!(feature = "parallel")
    }
}

/// Maps `f` over `items`, preserving order.
pub fn map<T, R, F>(exec: Execution, items: Vec<T>, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Sync + Send,
{
    match exec {
        Execution::Sequential => items.into_iter().map(f).collect(),
        Execution::Parallel(workers) => parallel_map(workers, items, f),
    }
}

#[cfg(feature = "parallel")]
fn parallel_map<T, R, F>(workers: usize, items: Vec<T>, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Sync + Send,
{
    use rayon::prelude::*;
    if workers == 0 {
        return items.into_par_iter().map(f).collect();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
        Ok(pool) => pool.install(|| items.into_par_iter().map(&f).collect()),
        Err(err) => {
            log::warn!("falling back to sequential execution: {err}");
            items.into_iter().map(f).collect()
        }
    }
}

#[cfg(not(feature = "parallel"))]
fn parallel_map<T, R, F>(_workers: usize, items: Vec<T>, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Sync + Send,
{
    items.into_iter().map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved() {
        let items: Vec<u64> = (0..1000).collect();
        let seq = map(Execution::Sequential, items.clone(), |x| x * x);
        let par = map(Execution::Parallel(4), items, |x| x * x);
        assert_eq!(seq, par);
    }

    #[test]
    fn workers_knob() {
        assert_eq!(Execution::from_workers(1), Execution::Sequential);
        assert_eq!(Execution::from_workers(3), Execution::Parallel(3));
    }
}
