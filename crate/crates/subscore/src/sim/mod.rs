//! Statevector simulation of the VQE problem.
//!
//! Everything here is exact: circuits act on dense `2^Q` amplitude vectors,
//! energies are full expectation values, and the ground truth comes from
//! dense diagonalization. Shot noise enters only through [`observe`], either
//! as an exact Gaussian channel or by sampling measurement bitstrings.

mod circuit;
mod observe;
mod pauli;
mod spectrum;
mod state;

pub use circuit::{build_efficient_su2, Gate, ParamCircuit};
pub use observe::{observe, NoiseModel};
pub use pauli::{build_heisenberg, ising_criticality, Hamiltonian, Pauli, PauliTerm};
pub use spectrum::{
    dense_matrix, estimate_single_shot_variance, exact_energy, ground_truth, hermiticity_defect,
};
pub use state::{fidelity, prepare_state, QuantumState};

/// Largest statevector dimension the dense eigensolver accepts.
pub const MAX_DENSE_DIM: usize = 4096;
