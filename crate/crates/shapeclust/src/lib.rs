//! File formats, parallel Gram assembly and the `shapeclust` command line
//! on top of `shapeclust-core`.

use std::time::Instant;

use shapeclust_core::Stopwatch;

pub mod commands;
pub mod config;
pub mod formats;
pub mod gram;
pub mod svg;

pub use config::RunConfig;
pub use formats::Dataset;

/// Monotonic wall clock for per-sweep timings.
#[derive(Debug, Clone, Copy)]
pub struct StdClock {
    origin: Instant,
}

impl StdClock {
    pub fn new() -> Self {
        StdClock { origin: Instant::now() }
    }
}

impl Default for StdClock {
    fn default() -> Self {
        Self::new()
    }
}

impl Stopwatch for StdClock {
    fn now_nanos(&self) -> u64 {
        self.origin.elapsed().as_nanos() as u64
    }
}
