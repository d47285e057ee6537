//! The shot-noise observation channel.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::pauli::{Hamiltonian, Pauli};
use super::spectrum::exact_energy;
use super::state::{apply_hadamard, apply_s_dagger, prepare_state, QuantumState};
use super::ParamCircuit;
use crate::error::Error;
use crate::Result;

/// How shot noise is generated. `eta2` is the single-shot variance; an
/// `N`-shot observation carries variance `eta2 / N`.
///
/// `GaussianExact` draws the noise from the Gaussian the regression model
/// assumes and is the default. `Sampled` draws actual measurement bitstrings
/// per operator group and exists for robustness checks; its reported variance
/// is still `eta2 / N` (the surrogate's working assumption).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum NoiseModel {
    GaussianExact { eta2: f64 },
    Sampled { eta2: f64 },
}

impl NoiseModel {
    pub fn eta2(&self) -> f64 {
        match self {
            NoiseModel::GaussianExact { eta2 } | NoiseModel::Sampled { eta2 } => *eta2,
        }
    }

    pub fn with_eta2(&self, eta2: f64) -> Result<NoiseModel> {
        if !(eta2 > 0.0) || !eta2.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "single-shot variance must be positive and finite, got {eta2}"
            )));
        }
        Ok(match self {
            NoiseModel::GaussianExact { .. } => NoiseModel::GaussianExact { eta2 },
            NoiseModel::Sampled { .. } => NoiseModel::Sampled { eta2 },
        })
    }
}

/// One noisy energy observation with `n_shots` measurement shots per
/// operator group. Returns the value and the noise variance the regression
/// should assume for it.
pub fn observe(
    circuit: &ParamCircuit,
    hamiltonian: &Hamiltonian,
    angles: &[f64],
    n_shots: u64,
    noise: &NoiseModel,
    rng: &mut impl Rng,
) -> Result<(f64, f64)> {
    if n_shots < 1 {
        return Err(Error::InvalidConfig("an observation needs at least 1 shot".into()));
    }
    let psi = prepare_state(circuit, angles);
    let variance = noise.eta2() / n_shots as f64;
    let value = match noise {
        NoiseModel::GaussianExact { .. } => {
            let draw: f64 = StandardNormal.sample(rng);
            exact_energy(hamiltonian, &psi) + draw * variance.sqrt()
        }
        NoiseModel::Sampled { .. } => sample_energy(hamiltonian, &psi, n_shots, rng),
    };
    Ok((value, variance))
}

/// Measures every operator group `n_shots` times in its own basis and
/// averages the per-shot eigenvalue sums.
fn sample_energy(
    hamiltonian: &Hamiltonian,
    psi: &QuantumState,
    n_shots: u64,
    rng: &mut impl Rng,
) -> f64 {
    let mut total = 0.0;
    for (group_idx, group) in hamiltonian.groups().iter().enumerate() {
        let basis = hamiltonian.group_basis(group_idx);
        let mut rotated: Vec<Complex64> = psi.amplitudes().to_vec();
        for (q, &letter) in basis.iter().enumerate() {
            match letter {
                Pauli::X => apply_hadamard(&mut rotated, q),
                Pauli::Y => {
                    apply_s_dagger(&mut rotated, q);
                    apply_hadamard(&mut rotated, q);
                }
                Pauli::I | Pauli::Z => {}
            }
        }
        // Cumulative distribution over basis states.
        let mut cdf = Vec::with_capacity(rotated.len());
        let mut acc = 0.0;
        for a in &rotated {
            acc += a.norm_sqr();
            cdf.push(acc);
        }
        let norm = acc;
        let mut group_sum = 0.0;
        for _ in 0..n_shots {
            let u: f64 = rng.random::<f64>() * norm;
            let outcome = cdf.partition_point(|&c| c <= u).min(cdf.len() - 1);
            for &term_idx in group {
                let term = &hamiltonian.terms()[term_idx];
                let mut eigenvalue = term.coefficient;
                for (q, letter) in term.letters.iter().enumerate() {
                    if !letter.is_identity() && (outcome >> q) & 1 == 1 {
                        eigenvalue = -eigenvalue;
                    }
                }
                group_sum += eigenvalue;
            }
        }
        total += group_sum / n_shots as f64;
    }
    total
}
