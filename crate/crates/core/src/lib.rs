//! Domain-theoretic imprecise probability on `[0,1]^d` and finite spaces.

pub mod error;
pub mod interval;
pub mod space;
pub mod beta;
pub mod valuation;
pub mod event;
pub mod inference;
pub mod credal;
pub mod independence;
pub mod logic;
pub mod polytope;
pub mod ifs;
pub mod markov;
pub mod json;

pub use error::{Error, Result};

/// Environment variable capping the worker threads used for parallel loops.
pub const THREADS_ENV: &str = "CREDAL_KERNEL_THREADS";

/// Sizes the global thread pool from [`THREADS_ENV`] when it holds a positive
/// integer. Returns the cap applied, if any; later calls have no effect.
pub fn configure_threads() -> Option<usize> {
    let n = std::env::var(THREADS_ENV).ok()?.trim().parse::<usize>().ok().filter(|&n| n > 0)?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().ok().map(|_| n)
}
