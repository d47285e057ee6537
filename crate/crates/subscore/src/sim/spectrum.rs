//! Exact energies, ground truth, and single-shot variance.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::pauli::Hamiltonian;
use super::state::{apply_pauli_string, QuantumState};
use super::MAX_DENSE_DIM;
use crate::error::Error;
use crate::Result;

fn sparse_letters(h: &Hamiltonian, term: usize) -> Vec<(usize, super::Pauli)> {
    h.terms()[term]
        .letters
        .iter()
        .enumerate()
        .filter(|(_, p)| !p.is_identity())
        .map(|(q, p)| (q, *p))
        .collect()
}

/// `<psi| H |psi>`. The imaginary part must vanish; anything above 1e-8
/// signals an internal inconsistency and panics.
pub fn exact_energy(hamiltonian: &Hamiltonian, psi: &QuantumState) -> f64 {
    assert_eq!(hamiltonian.num_qubits(), psi.num_qubits(), "qubit counts must match");
    let mut total = Complex64::ZERO;
    for (idx, term) in hamiltonian.terms().iter().enumerate() {
        let applied = apply_pauli_string(psi.amplitudes(), &sparse_letters(hamiltonian, idx));
        let expectation: Complex64 = psi
            .amplitudes()
            .iter()
            .zip(&applied)
            .map(|(a, b)| a.conj() * b)
            .sum();
        total += term.coefficient * expectation;
    }
    assert!(
        total.im.abs() < 1e-8,
        "expectation of a Hermitian operator came out complex: im = {}",
        total.im
    );
    total.re
}

/// Dense matrix representation of the Hamiltonian.
pub fn dense_matrix(hamiltonian: &Hamiltonian) -> DMatrix<Complex64> {
    let dim = 1usize << hamiltonian.num_qubits();
    let mut matrix = DMatrix::<Complex64>::zeros(dim, dim);
    for (idx, term) in hamiltonian.terms().iter().enumerate() {
        let letters = sparse_letters(hamiltonian, idx);
        // Column j of P is P|j>.
        for col in 0..dim {
            let mut basis = vec![Complex64::ZERO; dim];
            basis[col] = Complex64::ONE;
            let applied = apply_pauli_string(&basis, &letters);
            for (row, value) in applied.into_iter().enumerate() {
                if value != Complex64::ZERO {
                    matrix[(row, col)] += term.coefficient * value;
                }
            }
        }
    }
    matrix
}

/// `max |M - M^dagger|` over entries of the dense matrix.
pub fn hermiticity_defect(hamiltonian: &Hamiltonian) -> f64 {
    let m = dense_matrix(hamiltonian);
    let mut worst = 0.0f64;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Lowest eigenpair of the dense Hermitian matrix. The complex Hermitian
/// problem is embedded as a real symmetric one of twice the size
/// (`[[Re, -Im], [Im, Re]]`), which duplicates every eigenvalue.
pub fn ground_truth(hamiltonian: &Hamiltonian) -> Result<(f64, QuantumState)> {
    let dim = 1usize << hamiltonian.num_qubits();
    if dim > MAX_DENSE_DIM {
        return Err(Error::UnsupportedScale(format!(
            "dense diagonalization supports dimension <= {MAX_DENSE_DIM}, got {dim}"
        )));
    }
    let m = dense_matrix(hamiltonian);
    let mut embedded = DMatrix::<f64>::zeros(2 * dim, 2 * dim);
    for i in 0..dim {
        for j in 0..dim {
            let v = m[(i, j)];
            embedded[(i, j)] = v.re;
            embedded[(i + dim, j + dim)] = v.re;
            embedded[(i, j + dim)] = -v.im;
            embedded[(i + dim, j)] = v.im;
        }
    }
    let eigen = SymmetricEigen::new(embedded);
    let mut best = 0usize;
    for k in 1..eigen.eigenvalues.len() {
        if eigen.eigenvalues[k] < eigen.eigenvalues[best] {
            best = k;
        }
    }
    let energy = eigen.eigenvalues[best];
    let column = eigen.eigenvectors.column(best);
    let amplitudes: Vec<Complex64> = (0..dim)
        .map(|i| Complex64::new(column[i], column[i + dim]))
        .collect();
    Ok((energy, QuantumState::from_amplitudes(amplitudes)))
}

/// Variance of a one-shot-per-group energy estimate on `psi`:
/// the sum over measurement groups of `<O_g^2> - <O_g>^2` where `O_g` is the
/// group's weighted Pauli sum. This is the `eta^2` that converts shot counts
/// to observation noise via `sigma^2 = eta^2 / N`.
pub fn estimate_single_shot_variance(hamiltonian: &Hamiltonian, psi: &QuantumState) -> f64 {
    let mut total = 0.0;
    for group in hamiltonian.groups() {
        let mut applied = vec![Complex64::ZERO; psi.amplitudes().len()];
        for &term_idx in group {
            let coefficient = hamiltonian.terms()[term_idx].coefficient;
            let term_applied =
                apply_pauli_string(psi.amplitudes(), &sparse_letters(hamiltonian, term_idx));
            for (acc, value) in applied.iter_mut().zip(term_applied) {
                *acc += coefficient * value;
            }
        }
        let second_moment: f64 = applied.iter().map(|a| a.norm_sqr()).sum();
        let mean: Complex64 = psi
            .amplitudes()
            .iter()
            .zip(&applied)
            .map(|(a, b)| a.conj() * b)
            .sum();
        total += (second_moment - mean.re * mean.re).max(0.0);
    }
    total
}
