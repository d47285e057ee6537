//! Optimization loops: the NFT baseline and the adaptive shot-budgeted
//! variants, plus the CoRe threshold schedule that ties required accuracy to
//! observed progress.

mod runner;
mod schedule;
mod shots;

pub use runner::{
    run, NftRun, OptimizerConfig, OptimizerTrace, Strategy, SubscoreRun, TraceStep, VqeProblem,
    INIT_STEP_AXIS,
};
pub use schedule::{ols_slope, update_threshold, ScheduleParams};
pub use shots::{choose_shots_bound, choose_shots_center, ShotAllocation};
