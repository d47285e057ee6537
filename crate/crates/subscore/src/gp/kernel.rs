//! The VQE product kernel and its closed-form uniform posterior variance.

use serde::{Deserialize, Serialize};

/// Kernel hyperparameters. `gamma2` controls smoothness (larger suppresses
/// interaction terms), `sigma0_2` is the prior variance, and
/// `multiplicities[d]` is the trigonometric order along axis `d`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelParams {
    pub gamma2: f64,
    pub sigma0_2: f64,
    pub multiplicities: Vec<usize>,
}

impl KernelParams {
    pub fn new(gamma2: f64, sigma0_2: f64, multiplicities: Vec<usize>) -> Self {
        assert!(gamma2 > 0.0 && gamma2.is_finite(), "gamma^2 must be positive");
        assert!(sigma0_2 > 0.0 && sigma0_2.is_finite(), "sigma_0^2 must be positive");
        assert!(!multiplicities.is_empty());
        Self {
            gamma2,
            sigma0_2,
            multiplicities,
        }
    }

    pub fn dims(&self) -> usize {
        self.multiplicities.len()
    }
}

/// One axis factor: `(gamma^2 + 2 sum_{v=1..V} cos(v * delta)) / (gamma^2 + 2V)`.
#[inline]
pub(crate) fn axis_factor(delta: f64, gamma2: f64, order: usize) -> f64 {
    let mut acc = 0.0;
    for v in 1..=order {
        acc += (v as f64 * delta).cos();
    }
    (gamma2 + 2.0 * acc) / (gamma2 + 2.0 * order as f64)
}

/// The VQE kernel `k(x, x') = sigma_0^2 * prod_d axis_factor(x_d - x'_d)`.
pub fn vqe_kernel(x: &[f64], y: &[f64], params: &KernelParams) -> f64 {
    debug_assert_eq!(x.len(), params.dims());
    debug_assert_eq!(y.len(), params.dims());
    let mut product = params.sigma0_2;
    for ((a, b), &order) in x.iter().zip(y).zip(&params.multiplicities) {
        product *= axis_factor(a - b, params.gamma2, order);
    }
    product
}

/// Posterior variance after observing the `1 + 2V` equidistant line points
/// with equal noise variance `sigma2` and no other data. The value is
/// independent of the test angle (uniform along the whole line):
///
/// ```text
/// s = sigma2 * ((g + 2V)^2 r + (1 + 2V)^2 g) /
///     (((g + 2V) r + 1 + 2V) * ((g + 2V) r + (1 + 2V) g))
/// ```
///
/// with `g = gamma^2` and `r = sigma2 / sigma0^2`.
pub fn uniform_posterior_variance(sigma2: f64, params: &KernelParams, order: usize) -> f64 {
    assert!(sigma2 > 0.0, "observation noise variance must be positive");
    let g = params.gamma2;
    let v2 = 2.0 * order as f64;
    let ratio = sigma2 / params.sigma0_2;
    let numerator = (g + v2).powi(2) * ratio + (1.0 + v2).powi(2) * g;
    let denominator = ((g + v2) * ratio + 1.0 + v2) * ((g + v2) * ratio + (1.0 + v2) * g);
    sigma2 * numerator / denominator
}
