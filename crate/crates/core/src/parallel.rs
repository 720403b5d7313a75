use rayon::prelude::*;

/// Environment variable capping internal parallelism; `0` means sequential.
pub const THREADS_ENV: &str = "INEQLAB_THREADS";

/// How independent work items (restarts, trials) are scheduled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Parallelism {
    Sequential,
    /// A dedicated pool of this many threads.
    Threads(usize),
    /// Rayon's global pool.
    #[default]
    Auto,
}

impl Parallelism {
    /// Reads [`THREADS_ENV`]; unset or unparsable values mean [`Parallelism::Auto`].
    pub fn from_env() -> Self {
        match std::env::var(THREADS_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
        {
            Some(0) => Parallelism::Sequential,
            Some(n) => Parallelism::Threads(n),
            None => Parallelism::Auto,
        }
    }

    /// Computes `f(0..n)` and returns the results in index order, whatever
    /// the schedule.
    pub fn map<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self {
            Parallelism::Sequential => (0..n).map(f).collect(),
            Parallelism::Auto => (0..n).into_par_iter().map(f).collect(),
            Parallelism::Threads(k) => match rayon::ThreadPoolBuilder::new().num_threads(k).build() {
                Ok(pool) => pool.install(|| (0..n).into_par_iter().map(&f).collect()),
                Err(_) => (0..n).map(f).collect(),
            },
        }
    }
}
