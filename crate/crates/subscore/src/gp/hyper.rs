//! Kernel hyperparameter search and training-set compression.

use serde::{Deserialize, Serialize};

use super::kernel::KernelParams;
use super::model::{Dataset, GPModel};
use crate::Result;

/// Grid-search settings for the leave-one-out gamma fit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaSearch {
    pub min_gamma: f64,
    pub max_gamma: f64,
    pub steps: usize,
}

impl Default for GammaSearch {
    fn default() -> Self {
        Self {
            min_gamma: f64::sqrt(2.0),
            max_gamma: 20.0,
            steps: 90,
        }
    }
}

/// Log-spaced gamma candidates with both endpoints included.
pub fn gamma_grid(search: &GammaSearch) -> Vec<f64> {
    assert!(search.steps >= 2 && search.min_gamma > 0.0 && search.max_gamma > search.min_gamma);
    let (lo, hi) = (search.min_gamma.ln(), search.max_gamma.ln());
    (0..search.steps)
        .map(|i| (lo + (hi - lo) * i as f64 / (search.steps - 1) as f64).exp())
        .collect()
}

/// Picks `gamma^2` by minimizing the summed leave-one-out negative log
/// predictive density over the grid. Fewer than 3 observations carry no
/// usable signal, so the current value is returned unchanged. Ties break
/// toward the larger (smoother) gamma.
pub fn loo_gamma_search(
    data: &Dataset,
    current: &KernelParams,
    search: &GammaSearch,
) -> Result<f64> {
    if data.len() < 3 {
        return Ok(current.gamma2);
    }
    let mut best_gamma2 = current.gamma2;
    let mut best_nlpd = f64::INFINITY;
    for gamma in gamma_grid(search) {
        let gamma2 = gamma * gamma;
        let candidate = KernelParams::new(gamma2, current.sigma0_2, current.multiplicities.clone());
        let model = GPModel::fit(data.clone(), candidate)?;
        let nlpd = model.loo_nlpd();
        if nlpd.is_finite() && nlpd <= best_nlpd {
            best_nlpd = nlpd;
            best_gamma2 = gamma2;
        }
    }
    Ok(best_gamma2)
}

/// Bounds the GP training set: once more than `trigger` points are stored,
/// only the last `keep` survive. The dropped prefix is summarized by a
/// temporary GP fitted on it alone, and replaced by a single pivot row at
/// the first retained point's location carrying the temporary GP's predicted
/// mean with its predicted variance as observation noise.
pub fn compress(
    data: &Dataset,
    params: &KernelParams,
    trigger: usize,
    keep: usize,
) -> Result<Dataset> {
    assert!(keep >= 1 && trigger >= keep);
    if data.len() <= trigger {
        return Ok(data.clone());
    }
    let cut = data.len() - keep;
    let (prefix, suffix) = data.split_at(cut);
    let pivot_location = suffix.points()[0].clone();
    let temporary = GPModel::fit(prefix, params.clone())?;
    let (mean, cov) = temporary.posterior(std::slice::from_ref(&pivot_location));
    // The predictive variance is the pivot's observation noise; clamp away
    // from zero so the compressed system stays factorable.
    let noise = cov[(0, 0)].max(1e-12 * params.sigma0_2);
    let mut compressed = Dataset::new();
    compressed.push(&pivot_location, mean[0], noise);
    for i in 0..suffix.len() {
        compressed.push(&suffix.points()[i], suffix.values()[i], suffix.noise_vars()[i]);
    }
    Ok(compressed)
}
