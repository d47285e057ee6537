//! Parameterized ansatz circuits.

use super::pauli::Pauli;
use crate::error::Error;
use crate::Result;

/// One circuit element. Rotations implement `exp(-i theta P / 2)` for a
/// Pauli string `P`; the angle is looked up by parameter index.
#[derive(Clone, Debug, PartialEq)]
pub enum Gate {
    Rotation {
        /// Non-identity letters of the rotation generator, one per qubit acted on.
        paulis: Vec<(usize, Pauli)>,
        /// Index into the parameter vector.
        param: usize,
    },
    /// Fixed CX entangler.
    Cx { control: usize, target: usize },
}

/// Ordered gate list with the parameter bookkeeping the optimizers rely on:
/// `multiplicities[d]` counts how many gates reference parameter `d`, which
/// bounds the trigonometric order of the objective along axis `d`.
#[derive(Clone, Debug)]
pub struct ParamCircuit {
    num_qubits: usize,
    num_params: usize,
    gates: Vec<Gate>,
    multiplicities: Vec<usize>,
}

impl ParamCircuit {
    pub fn new(num_qubits: usize, num_params: usize, gates: Vec<Gate>) -> Result<Self> {
        let mut multiplicities = vec![0usize; num_params];
        for gate in &gates {
            match gate {
                Gate::Rotation { paulis, param } => {
                    if *param >= num_params {
                        return Err(Error::InvalidConfig(format!(
                            "rotation references parameter {param}, circuit has {num_params}"
                        )));
                    }
                    if paulis.is_empty() || paulis.iter().any(|(q, p)| *q >= num_qubits || p.is_identity())
                    {
                        return Err(Error::InvalidConfig(
                            "rotation generator must name in-range qubits with non-identity letters"
                                .into(),
                        ));
                    }
                    multiplicities[*param] += 1;
                }
                Gate::Cx { control, target } => {
                    if *control >= num_qubits || *target >= num_qubits || control == target {
                        return Err(Error::InvalidConfig(format!(
                            "CX on ({control}, {target}) is out of range for {num_qubits} qubits"
                        )));
                    }
                }
            }
        }
        if multiplicities.contains(&0) {
            return Err(Error::InvalidConfig("every parameter must drive at least one gate".into()));
        }
        Ok(Self {
            num_qubits,
            num_params,
            gates,
            multiplicities,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn num_params(&self) -> usize {
        self.num_params
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    /// Per-parameter gate multiplicities `V_d`.
    pub fn multiplicities(&self) -> &[usize] {
        &self.multiplicities
    }

    pub fn multiplicity(&self, param: usize) -> usize {
        self.multiplicities[param]
    }
}

/// The `L`-layered EfficientSU2 ansatz with open boundary conditions:
/// `L + 1` blocks of fresh RY then RZ rotations on every qubit, with a CX
/// ladder on neighbor pairs between consecutive blocks. Every parameter
/// drives exactly one gate, so the objective is first order along each of
/// the `2 Q (L + 1)` axes.
pub fn build_efficient_su2(num_qubits: usize, layers: usize) -> Result<ParamCircuit> {
    if num_qubits < 2 {
        return Err(Error::InvalidConfig(format!(
            "EfficientSU2 needs at least 2 qubits, got {num_qubits}"
        )));
    }
    let num_params = 2 * num_qubits * (layers + 1);
    let mut gates = Vec::new();
    let mut next_param = 0usize;
    for block in 0..=layers {
        for axis in [Pauli::Y, Pauli::Z] {
            for q in 0..num_qubits {
                gates.push(Gate::Rotation {
                    paulis: vec![(q, axis)],
                    param: next_param,
                });
                next_param += 1;
            }
        }
        if block < layers {
            for q in 0..num_qubits - 1 {
                gates.push(Gate::Cx {
                    control: q,
                    target: q + 1,
                });
            }
        }
    }
    debug_assert_eq!(next_param, num_params);
    ParamCircuit::new(num_qubits, num_params, gates)
}
