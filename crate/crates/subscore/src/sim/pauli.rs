//! Weighted Pauli strings and measurement grouping.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::Result;

/// Single-qubit Pauli letter.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn is_identity(self) -> bool {
        self == Pauli::I
    }
}

/// One weighted Pauli string, e.g. `0.5 * X I X`.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliTerm {
    pub coefficient: f64,
    pub letters: Vec<Pauli>,
}

impl PauliTerm {
    pub fn new(coefficient: f64, letters: Vec<Pauli>) -> Result<Self> {
        if !coefficient.is_finite() || coefficient == 0.0 {
            return Err(Error::InvalidInput(format!(
                "Pauli term coefficient must be finite and nonzero, got {coefficient}"
            )));
        }
        if letters.is_empty() {
            return Err(Error::InvalidInput("Pauli term needs at least one letter".into()));
        }
        Ok(Self { coefficient, letters })
    }

    pub fn num_qubits(&self) -> usize {
        self.letters.len()
    }
}

/// Sum of weighted Pauli strings, partitioned into qubit-wise commuting
/// measurement groups. Shots are accounted per group: one observation with
/// `N` shots measures every group `N` times.
#[derive(Clone, Debug)]
pub struct Hamiltonian {
    num_qubits: usize,
    terms: Vec<PauliTerm>,
    groups: Vec<Vec<usize>>,
    /// Per group, the single non-identity letter each qubit uses (I if none).
    group_bases: Vec<Vec<Pauli>>,
}

impl Hamiltonian {
    /// Builds the Hamiltonian and greedily partitions the terms into
    /// qubit-wise commuting groups (first-fit).
    pub fn new(num_qubits: usize, terms: Vec<PauliTerm>) -> Result<Self> {
        for term in &terms {
            if term.num_qubits() != num_qubits {
                return Err(Error::InvalidInput(format!(
                    "term has {} letters, expected {num_qubits}",
                    term.num_qubits()
                )));
            }
        }
        let mut groups: Vec<Vec<usize>> = Vec::new();
        let mut group_bases: Vec<Vec<Pauli>> = Vec::new();
        for (idx, term) in terms.iter().enumerate() {
            let slot = group_bases
                .iter()
                .position(|basis| Self::qubitwise_compatible(basis, &term.letters));
            match slot {
                Some(g) => {
                    groups[g].push(idx);
                    for (b, &l) in group_bases[g].iter_mut().zip(&term.letters) {
                        if b.is_identity() {
                            *b = l;
                        }
                    }
                }
                None => {
                    groups.push(vec![idx]);
                    group_bases.push(term.letters.clone());
                }
            }
        }
        Ok(Self {
            num_qubits,
            terms,
            groups,
            group_bases,
        })
    }

    fn qubitwise_compatible(basis: &[Pauli], letters: &[Pauli]) -> bool {
        basis
            .iter()
            .zip(letters)
            .all(|(&b, &l)| b.is_identity() || l.is_identity() || b == l)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    /// Per-qubit measurement basis of one group.
    pub fn group_basis(&self, group: usize) -> &[Pauli] {
        &self.group_bases[group]
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Sum of absolute coefficients; a cheap upper bound on the spectral radius.
    pub fn coefficient_l1(&self) -> f64 {
        self.terms.iter().map(|t| t.coefficient.abs()).sum()
    }
}

/// Heisenberg chain with open boundary conditions:
/// nearest-neighbor `J_i` couplings and uniform fields `h_i` for
/// `i in {X, Y, Z}`, with an overall minus sign on every term.
/// Zero-coefficient terms are omitted.
pub fn build_heisenberg(num_qubits: usize, j: [f64; 3], h: [f64; 3]) -> Result<Hamiltonian> {
    if num_qubits < 2 {
        return Err(Error::InvalidConfig(format!(
            "Heisenberg chain needs at least 2 qubits, got {num_qubits}"
        )));
    }
    let axes = [Pauli::X, Pauli::Y, Pauli::Z];
    let mut terms = Vec::new();
    for (axis_idx, &axis) in axes.iter().enumerate() {
        let coupling = -j[axis_idx];
        if coupling != 0.0 {
            for q in 0..num_qubits - 1 {
                let mut letters = vec![Pauli::I; num_qubits];
                letters[q] = axis;
                letters[q + 1] = axis;
                terms.push(PauliTerm::new(coupling, letters)?);
            }
        }
        let field = -h[axis_idx];
        if field != 0.0 {
            for q in 0..num_qubits {
                let mut letters = vec![Pauli::I; num_qubits];
                letters[q] = axis;
                terms.push(PauliTerm::new(field, letters)?);
            }
        }
    }
    Hamiltonian::new(num_qubits, terms)
}

/// The transverse-field Ising chain at criticality used by the benchmarks.
pub fn ising_criticality(num_qubits: usize) -> Result<Hamiltonian> {
    build_heisenberg(num_qubits, [-1.0, 0.0, 0.0], [0.0, 0.0, -1.0])
}
