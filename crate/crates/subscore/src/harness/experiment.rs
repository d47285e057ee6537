//! Seeded multi-trial execution.
//!
//! Trials are independent: each seed derives its own starting point and
//! observation noise stream, so they can run on a worker pool without any
//! shared mutable state. Results are sorted by seed, making the output
//! independent of scheduling order.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use super::config::RunConfig;
use crate::optim::{run, OptimizerTrace};
use crate::Result;

/// Runs every seed in the config and returns the traces sorted by seed.
/// Uses the rayon worker pool when the `parallel` feature is enabled.
pub fn run_experiment(config: &RunConfig) -> Result<Vec<OptimizerTrace>> {
    config.validate()?;
    let problem = config.problem()?;
    let optimizer = config.optimizer_config()?;
    #[cfg(feature = "parallel")]
    let mut traces: Vec<OptimizerTrace> = config
        .seeds
        .par_iter()
        .map(|&seed| run(&problem, &optimizer, seed))
        .collect::<Result<_>>()?;
    #[cfg(not(feature = "parallel"))]
    let mut traces: Vec<OptimizerTrace> = config
        .seeds
        .iter()
        .map(|&seed| run(&problem, &optimizer, seed))
        .collect::<Result<_>>()?;
    traces.sort_by_key(|t| t.seed);
    Ok(traces)
}

/// Sequential fallback, always available; the benchmark suite compares this
/// against the parallel path.
pub fn run_experiment_serial(config: &RunConfig) -> Result<Vec<OptimizerTrace>> {
    config.validate()?;
    let problem = config.problem()?;
    let optimizer = config.optimizer_config()?;
    let mut traces: Vec<OptimizerTrace> = config
        .seeds
        .iter()
        .map(|&seed| run(&problem, &optimizer, seed))
        .collect::<Result<_>>()?;
    traces.sort_by_key(|t| t.seed);
    Ok(traces)
}
