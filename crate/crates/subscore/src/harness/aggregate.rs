//! Quantile convergence curves over shot-budget checkpoints.

use crate::error::Error;
use crate::optim::OptimizerTrace;
use crate::Result;

/// Quantile curves of best-so-far metrics across traces.
/// `energy[level][checkpoint]` indexes the levels of `levels` in order.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantileCurves {
    pub checkpoints: Vec<u64>,
    pub levels: Vec<f64>,
    pub energy: Vec<Vec<f64>>,
    pub fidelity: Vec<Vec<f64>>,
}

/// Linear-interpolation quantile of a sorted slice.
fn quantile(sorted: &[f64], level: f64) -> f64 {
    assert!(!sorted.is_empty());
    let position = level.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let below = position.floor() as usize;
    let above = position.ceil() as usize;
    if below == above {
        sorted[below]
    } else {
        let w = position - below as f64;
        sorted[below] * (1.0 - w) + sorted[above] * w
    }
}

/// Best-so-far metric values of one trace at a checkpoint (step function,
/// carry last value). `None` before the trace's first row: an infinite
/// sentinel that is excluded from the quantiles.
fn best_so_far(trace: &OptimizerTrace, checkpoint: u64) -> Option<(f64, f64)> {
    let mut best: Option<(f64, f64)> = None;
    for step in &trace.steps {
        if step.cum_shots > checkpoint {
            break;
        }
        best = Some(match best {
            None => (step.delta_energy, step.delta_fidelity),
            Some((e, f)) => (e.min(step.delta_energy), f.min(step.delta_fidelity)),
        });
    }
    best
}

/// Aggregates traces into quantile curves at the given checkpoints.
pub fn aggregate(
    traces: &[OptimizerTrace],
    checkpoints: &[u64],
    levels: &[f64],
) -> Result<QuantileCurves> {
    if traces.is_empty() {
        return Err(Error::InvalidInput("cannot aggregate zero traces".into()));
    }
    if levels.is_empty() || levels.iter().any(|q| !(0.0..=1.0).contains(q)) {
        return Err(Error::InvalidInput("quantile levels must lie in [0, 1]".into()));
    }
    let mut energy = vec![Vec::with_capacity(checkpoints.len()); levels.len()];
    let mut fidelity = vec![Vec::with_capacity(checkpoints.len()); levels.len()];
    for &checkpoint in checkpoints {
        let mut energies: Vec<f64> = Vec::new();
        let mut fidelities: Vec<f64> = Vec::new();
        for trace in traces {
            if let Some((e, f)) = best_so_far(trace, checkpoint) {
                energies.push(e);
                fidelities.push(f);
            }
        }
        energies.sort_by(f64::total_cmp);
        fidelities.sort_by(f64::total_cmp);
        for (i, &level) in levels.iter().enumerate() {
            if energies.is_empty() {
                energy[i].push(f64::INFINITY);
                fidelity[i].push(f64::INFINITY);
            } else {
                energy[i].push(quantile(&energies, level));
                fidelity[i].push(quantile(&fidelities, level));
            }
        }
    }
    Ok(QuantileCurves {
        checkpoints: checkpoints.to_vec(),
        levels: levels.to_vec(),
        energy,
        fidelity,
    })
}
