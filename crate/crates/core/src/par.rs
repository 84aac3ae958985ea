//! Order-preserving indexed map, data-parallel when the `parallel` feature is on.

/// How a batch of independent jobs is executed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// Thread count; `None` uses the available parallelism. Falls back to
    /// sequential execution when built without the `parallel` feature.
    Parallel {
        jobs: Option<usize>,
    },
}

impl Default for Execution {
    fn default() -> Self {
        Execution::Parallel { jobs: None }
    }
}

impl Execution {
    pub fn with_jobs(jobs: Option<usize>) -> Self {
        match jobs {
            Some(1) => Execution::Sequential,
            jobs => Execution::Parallel { jobs },
        }
    }
}

/// `(0..n).map(f)` with results in index order regardless of scheduling.
pub fn map_indexed<T, F>(n: usize, exec: Execution, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match exec {
        Execution::Sequential => (0..n).map(f).collect(),
        Execution::Parallel { jobs } => parallel_map(n, jobs, f),
    }
}

#[cfg(feature = "parallel")]
fn parallel_map<T, F>(n: usize, jobs: Option<usize>, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    let run = || (0..n).into_par_iter().map(&f).collect();
    match jobs {
        None => run(),
        Some(j) => match rayon::ThreadPoolBuilder::new().num_threads(j).build() {
            Ok(pool) => pool.install(run),
            Err(_) => (0..n).map(&f).collect(),
        },
    }
}

#[cfg(not(feature = "parallel"))]
fn parallel_map<T, F>(n: usize, _jobs: Option<usize>, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_canonical() {
        let seq = map_indexed(1000, Execution::Sequential, |i| i * i);
        for jobs in [None, Some(1), Some(3)] {
            assert_eq!(map_indexed(1000, Execution::with_jobs(jobs), |i| i * i), seq);
        }
        assert!(map_indexed(0, Execution::default(), |i| i).is_empty());
    }
}
