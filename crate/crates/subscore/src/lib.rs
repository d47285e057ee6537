//! Adaptive measurement-shot budgeting for variational quantum eigensolvers.
//!
//! A VQE loop spends almost all of its quantum budget on repeated measurement
//! shots. This crate implements sequential minimal optimization (NFT-style
//! coordinate descent) on a built-in statevector simulator, together with a
//! Gaussian-process surrogate whose product trigonometric kernel matches the
//! VQE objective exactly along every axis. The surrogate's confident region
//! (CoRe) — the set of points where the posterior variance is below a
//! threshold — drives the shot allocation: each step buys just enough shots,
//! distributed over the equidistant line points, that the whole updated 1D
//! subspace stays inside the CoRe.
//!
//! Modules:
//! - [`sim`]: Pauli Hamiltonians, the parameterized circuit, exact energies,
//!   ground truth via dense diagonalization, and the shot-noise channel.
//! - [`gp`]: heteroscedastic GP regression with the VQE kernel, CoRe queries,
//!   1D trigonometric regression, hyperparameter search, and training-set
//!   compression.
//! - [`optim`]: the NFT baseline and the adaptive center/bound shot
//!   allocation loops with threshold scheduling.
//! - [`harness`]: configuration, seeded multi-trial execution, quantile
//!   aggregation, the Wilcoxon signed-rank test, and CSV/JSON export.

pub mod error;
pub mod gp;
pub mod harness;
pub mod optim;
pub mod sim;

pub use error::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
