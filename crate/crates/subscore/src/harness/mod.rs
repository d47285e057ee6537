//! Experiment harness: configuration, seeded multi-trial execution, metric
//! aggregation, statistical comparison, and file export.

mod aggregate;
mod config;
mod experiment;
mod export;
mod stats;

pub use aggregate::{aggregate, QuantileCurves};
pub use config::{NoiseKind, RunConfig};
pub use experiment::{run_experiment, run_experiment_serial};
pub use export::{
    parse_trace_csv, read_json, render_csv, write_csv, write_json, ExperimentRecord, CSV_HEADER,
};
pub use stats::{wilcoxon_signed_rank, wilcoxon_signed_rank_with, Alternative};
