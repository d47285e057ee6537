//! Heteroscedastic Gaussian-process regression with the VQE kernel.
//!
//! The kernel is the product, over axes, of truncated Fourier kernels whose
//! order matches the per-axis gate multiplicity, so the GP posterior mean is
//! exactly a low-order trigonometric polynomial along every axis. That makes
//! three things cheap: interpolating the mean from a handful of line points,
//! minimizing it in closed form, and reasoning about the posterior variance
//! produced by equidistant observations (which is uniform along the line).

mod hyper;
mod kernel;
mod model;
mod trig;

pub use hyper::{compress, gamma_grid, loo_gamma_search, GammaSearch};
pub use kernel::{uniform_posterior_variance, vqe_kernel, KernelParams};
pub use model::{equidistant_line_points, line_grid, Dataset, GPModel, LineProbe};
pub use trig::{fit_trig_1d, minimize_trig_1d, TrigPoly1D};

/// Test angles used when checking a whole line against the CoRe threshold.
/// The variance along a line is a trigonometric polynomial of order at most
/// `2 V_d`, so 64 equidistant angles oversample it for every supported order.
pub const DEFAULT_CORE_GRID: usize = 64;
