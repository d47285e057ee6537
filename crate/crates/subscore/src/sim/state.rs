//! Dense statevector and gate application.
//!
//! Qubit `q` maps to bit `q` of the amplitude index (little-endian), so the
//! all-zeros state is amplitude index 0.

use num_complex::Complex64;
use std::f64::consts::TAU;

use super::circuit::{Gate, ParamCircuit};
use super::pauli::Pauli;

/// Normalized `2^Q` complex amplitude vector.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumState {
    amplitudes: Vec<Complex64>,
}

impl QuantumState {
    /// `|0...0>` on `num_qubits` qubits.
    pub fn zero(num_qubits: usize) -> Self {
        let mut amplitudes = vec![Complex64::ZERO; 1 << num_qubits];
        amplitudes[0] = Complex64::ONE;
        Self { amplitudes }
    }

    /// Builds a state from raw amplitudes, normalizing them.
    pub fn from_amplitudes(mut amplitudes: Vec<Complex64>) -> Self {
        assert!(amplitudes.len().is_power_of_two(), "dimension must be 2^Q");
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        assert!(norm > 0.0, "cannot normalize the zero vector");
        for a in &mut amplitudes {
            *a /= norm;
        }
        Self { amplitudes }
    }

    pub fn num_qubits(&self) -> usize {
        self.amplitudes.len().trailing_zeros() as usize
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `<self|other>`.
    pub fn overlap(&self, other: &QuantumState) -> Complex64 {
        assert_eq!(self.amplitudes.len(), other.amplitudes.len());
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Measurement probabilities `|amplitude|^2`.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }
}

/// `P |psi>` for a Pauli string given as sparse (qubit, letter) pairs.
pub(crate) fn apply_pauli_string(
    amplitudes: &[Complex64],
    paulis: &[(usize, Pauli)],
) -> Vec<Complex64> {
    let mut flip_mask = 0usize;
    for &(q, p) in paulis {
        if matches!(p, Pauli::X | Pauli::Y) {
            flip_mask |= 1 << q;
        }
    }
    let mut out = vec![Complex64::ZERO; amplitudes.len()];
    for (idx, &amp) in amplitudes.iter().enumerate() {
        if amp == Complex64::ZERO {
            continue;
        }
        let mut factor = Complex64::ONE;
        for &(q, p) in paulis {
            let bit = (idx >> q) & 1;
            match p {
                Pauli::I => {}
                Pauli::X => {}
                // Y|0> = i|1>, Y|1> = -i|0>
                Pauli::Y => {
                    factor *= if bit == 0 {
                        Complex64::new(0.0, 1.0)
                    } else {
                        Complex64::new(0.0, -1.0)
                    }
                }
                Pauli::Z => {
                    if bit == 1 {
                        factor = -factor;
                    }
                }
            }
        }
        out[idx ^ flip_mask] += factor * amp;
    }
    out
}

fn apply_rotation(amplitudes: &mut [Complex64], paulis: &[(usize, Pauli)], theta: f64) {
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let rotated = apply_pauli_string(amplitudes, paulis);
    let minus_i_sin = Complex64::new(0.0, -s);
    for (a, r) in amplitudes.iter_mut().zip(rotated) {
        *a = c * *a + minus_i_sin * r;
    }
}

fn apply_cx(amplitudes: &mut [Complex64], control: usize, target: usize) {
    let control_mask = 1usize << control;
    let target_mask = 1usize << target;
    for idx in 0..amplitudes.len() {
        // Visit each swapped pair once via its target-0 member.
        if idx & control_mask != 0 && idx & target_mask == 0 {
            amplitudes.swap(idx, idx | target_mask);
        }
    }
}

/// Hadamard on one qubit; used to rotate X-basis terms into the
/// computational basis for sampled measurements.
pub(crate) fn apply_hadamard(amplitudes: &mut [Complex64], qubit: usize) {
    let mask = 1usize << qubit;
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    for idx in 0..amplitudes.len() {
        if idx & mask == 0 {
            let a0 = amplitudes[idx];
            let a1 = amplitudes[idx | mask];
            amplitudes[idx] = inv_sqrt2 * (a0 + a1);
            amplitudes[idx | mask] = inv_sqrt2 * (a0 - a1);
        }
    }
}

/// `S^dagger` on one qubit; `H S^dagger` maps the Y eigenbasis to Z.
pub(crate) fn apply_s_dagger(amplitudes: &mut [Complex64], qubit: usize) {
    let mask = 1usize << qubit;
    let minus_i = Complex64::new(0.0, -1.0);
    for (idx, amp) in amplitudes.iter_mut().enumerate() {
        if idx & mask != 0 {
            *amp *= minus_i;
        }
    }
}

/// Runs the circuit on `|0...0>`. Angles are taken mod `2*pi`; rotations act
/// as `cos(theta/2) I - i sin(theta/2) P`.
pub fn prepare_state(circuit: &ParamCircuit, angles: &[f64]) -> QuantumState {
    assert_eq!(
        angles.len(),
        circuit.num_params(),
        "angle vector length must match parameter count"
    );
    let mut amplitudes = vec![Complex64::ZERO; 1 << circuit.num_qubits()];
    amplitudes[0] = Complex64::ONE;
    for gate in circuit.gates() {
        match gate {
            Gate::Rotation { paulis, param } => {
                apply_rotation(&mut amplitudes, paulis, angles[*param].rem_euclid(TAU));
            }
            Gate::Cx { control, target } => apply_cx(&mut amplitudes, *control, *target),
        }
    }
    QuantumState { amplitudes }
}

/// Overlap magnitude `|<gs|psi>|`, invariant under global phase.
pub fn fidelity(ground_state: &QuantumState, psi: &QuantumState) -> f64 {
    ground_state.overlap(psi).norm().min(1.0)
}
