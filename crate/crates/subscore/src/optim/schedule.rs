//! CoRe threshold scheduling.
//!
//! The threshold kappa is a standard deviation in energy units. Shot-count
//! knobs convert through the single-shot variance: a threshold "worth N
//! shots" is kappa^2 = eta^2 / N. The schedule tracks optimization progress
//! with an ordinary least-squares slope over the recent best values and
//! clamps from below so no point ever costs more than `c0_shots` shots.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::Result;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScheduleParams {
    /// Initial CoRe threshold, expressed as a shot count (kappa_0^2 = eta^2 / kappa0_shots).
    pub kappa0_shots: u64,
    /// Lower clamp on kappa, expressed as a per-point shot cap.
    pub c0_shots: u64,
    /// Linear gain between the negative progress slope and kappa.
    pub c1: f64,
    /// Window length for the slope estimate.
    pub t_ave: usize,
}

impl Default for ScheduleParams {
    fn default() -> Self {
        Self {
            kappa0_shots: 512,
            c0_shots: 1024,
            c1: 1.0,
            t_ave: 40,
        }
    }
}

impl ScheduleParams {
    pub fn validate(&self) -> Result<()> {
        if self.kappa0_shots == 0 || self.c0_shots == 0 || self.t_ave == 0 {
            return Err(Error::InvalidConfig("schedule counts must be positive".into()));
        }
        if !(self.c1 >= 0.0) || !self.c1.is_finite() {
            return Err(Error::InvalidConfig(format!("C1 must be finite and >= 0, got {}", self.c1)));
        }
        if self.c0_shots * 8 < self.kappa0_shots {
            return Err(Error::InvalidConfig(format!(
                "shot cap {} is implausibly far below the initial threshold {}",
                self.c0_shots, self.kappa0_shots
            )));
        }
        Ok(())
    }

    pub fn initial_kappa2(&self, eta2: f64) -> f64 {
        eta2 / self.kappa0_shots as f64
    }

    pub fn kappa2_floor(&self, eta2: f64) -> f64 {
        eta2 / self.c0_shots as f64
    }
}

/// Ordinary least-squares slope of `values` against their indices.
pub fn ols_slope(values: &[f64]) -> f64 {
    let n = values.len();
    assert!(n >= 2, "a slope needs at least two points");
    let nf = n as f64;
    let mean_t = (nf - 1.0) / 2.0;
    let mean_y: f64 = values.iter().sum::<f64>() / nf;
    let mut cov = 0.0;
    let mut var = 0.0;
    for (t, &y) in values.iter().enumerate() {
        let dt = t as f64 - mean_t;
        cov += dt * (y - mean_y);
        var += dt * dt;
    }
    cov / var
}

/// Next CoRe threshold (as a variance). With fewer than `t_ave` recorded
/// best values the current threshold is kept; afterwards
/// `kappa = max(sqrt(eta^2 / c0_shots), -c1 * slope)` over the trailing
/// window, so rising or flat histories fall back to the clamp.
pub fn update_threshold(
    history: &[f64],
    current_kappa2: f64,
    sched: &ScheduleParams,
    eta2: f64,
) -> f64 {
    assert!(!history.is_empty());
    if history.len() < sched.t_ave {
        return current_kappa2;
    }
    let window = &history[history.len() - sched.t_ave..];
    let slope = ols_slope(window);
    let kappa = f64::max(sched.kappa2_floor(eta2).sqrt(), -sched.c1 * slope);
    kappa * kappa
}
