//! Gate-level machine descriptions and the `.qmm` text format.
//!
//! A [`MachineSpec`] describes a machine over qubits: named gate bindings
//! (builtin gates tensor-embedded into the full space, or explicit
//! matrices), a set of measured qubits (the measurement projects onto
//! computational-basis patterns of those qubits), and named initial
//! states. Specs are built programmatically or parsed from the
//! line-oriented `.qmm` format:
//!
//! ```text
//! # comments run to end of line
//! qubits 2
//!
//! gates
//!   C  = CNOT 0 1
//!   H1 = H 0
//! end
//!
//! measure 0
//!
//! states
//!   00 = ket 00
//!   01 = ket 01
//! end
//! ```
//!
//! The `qubits` line comes first. Gate expressions are `H q`, `X q`,
//! `Z q`, `S q` (the phase gate diag(1, i)), `CNOT c t`, `SWAP a b`, or
//! `matrix [a+bi, ...; ...]` with semicolon-separated rows spanning the
//! full 2^q dimension. State expressions are `ket <bits>`,
//! `bell <xy>` (two-qubit machines), or `matrix [...]` (a density
//! matrix). Qubit 0 is the leftmost ket symbol, i.e. the most significant
//! bit of a basis index.

mod parse;
pub mod random;

pub use parse::{parse_machine_spec, ParseError};
pub use random::{benchmark_suite, BenchCase};

use std::collections::BTreeMap;

use crate::linalg::{Complex, ComplexMatrix};
use crate::model::{DensityOperator, ModelError, QuantumMealyMachine};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CircuitError {
    #[error("qubit index {qubit} out of range for {qubits} qubits")]
    QubitOutOfRange { qubit: usize, qubits: usize },
    #[error("CNOT control equals target (qubit {0})")]
    ControlEqualsTarget(usize),
    #[error("SWAP qubits are equal (qubit {0})")]
    SwapQubitsEqual(usize),
    #[error("no input symbols: the gate section is empty")]
    NoGates,
    #[error("no measured qubits")]
    NoMeasuredQubits,
    #[error("duplicate measured qubit {0}")]
    DuplicateMeasuredQubit(usize),
    #[error("matrix for {name:?} is {got}x{got2}, expected {expected}x{expected}")]
    WrongMatrixDimension {
        name: String,
        got: usize,
        got2: usize,
        expected: usize,
    },
    #[error("ket for {name:?} has {got} bits, expected {expected}")]
    WrongKetLength {
        name: String,
        got: usize,
        expected: usize,
    },
    #[error("bell states need exactly 2 qubits, machine has {0}")]
    BellNeedsTwoQubits(usize),
    #[error("duplicate name {0:?}")]
    DuplicateName(String),
    #[error("unknown state {0:?}")]
    UnknownState(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// A named gate binding's expression.
#[derive(Clone, Debug)]
pub enum GateExpr {
    Hadamard(usize),
    PauliX(usize),
    PauliZ(usize),
    /// Phase gate diag(1, i).
    PhaseS(usize),
    ControlledNot { control: usize, target: usize },
    Swap(usize, usize),
    /// Explicit unitary over the full 2^q dimension.
    Matrix(ComplexMatrix),
}

/// A named initial state's expression.
#[derive(Clone, Debug)]
pub enum StateExpr {
    /// Computational basis state from bits, qubit 0 first.
    Ket(Vec<u8>),
    /// Maximally entangled two-qubit state
    /// (|0y⟩ + (-1)^x |1 y̅⟩)/√2.
    Bell { x: u8, y: u8 },
    /// Explicit density matrix over the full dimension.
    Matrix(ComplexMatrix),
}

/// Gate-level machine description over qubits.
#[derive(Clone, Debug)]
pub struct MachineSpec {
    qubit_count: usize,
    gates: Vec<(String, GateExpr)>,
    measured_qubits: Vec<usize>,
    states: Vec<(String, StateExpr)>,
}

impl MachineSpec {
    pub fn new(qubit_count: usize) -> Self {
        MachineSpec {
            qubit_count,
            gates: Vec::new(),
            measured_qubits: Vec::new(),
            states: Vec::new(),
        }
    }

    pub fn qubit_count(&self) -> usize {
        self.qubit_count
    }

    /// Hilbert space dimension, 2^qubits.
    pub fn dimension(&self) -> usize {
        1 << self.qubit_count
    }

    pub fn add_gate(&mut self, name: &str, expr: GateExpr) -> &mut Self {
        self.gates.push((name.to_string(), expr));
        self
    }

    pub fn measure(&mut self, qubits: &[usize]) -> &mut Self {
        self.measured_qubits = qubits.to_vec();
        self
    }

    pub fn add_state(&mut self, name: &str, expr: StateExpr) -> &mut Self {
        self.states.push((name.to_string(), expr));
        self
    }

    pub fn gate_names(&self) -> Vec<&str> {
        self.gates.iter().map(|(n, _)| n.as_str()).collect()
    }

    pub fn measured_qubits(&self) -> &[usize] {
        &self.measured_qubits
    }

    pub fn state_names(&self) -> Vec<&str> {
        self.states.iter().map(|(n, _)| n.as_str()).collect()
    }

    /// Builds the machine: gates expand to unitaries in binding order, the
    /// measurement projects onto the 2^k computational patterns of the k
    /// measured qubits (output symbols are the pattern bitstrings in
    /// ascending order).
    pub fn build_machine(&self) -> Result<QuantumMealyMachine, CircuitError> {
        if self.gates.is_empty() {
            return Err(CircuitError::NoGates);
        }
        if self.measured_qubits.is_empty() {
            return Err(CircuitError::NoMeasuredQubits);
        }
        for (i, &q) in self.measured_qubits.iter().enumerate() {
            self.check_qubit(q)?;
            if self.measured_qubits[..i].contains(&q) {
                return Err(CircuitError::DuplicateMeasuredQubit(q));
            }
        }
        let mut input_alphabet = Vec::new();
        let mut unitaries = Vec::new();
        for (name, expr) in &self.gates {
            if input_alphabet.contains(name) {
                return Err(CircuitError::DuplicateName(name.clone()));
            }
            input_alphabet.push(name.clone());
            unitaries.push(self.expand_gate(name, expr)?);
        }
        let k = self.measured_qubits.len();
        let dim = self.dimension();
        let mut output_alphabet = Vec::with_capacity(1 << k);
        let mut measurements = Vec::with_capacity(1 << k);
        for pattern in 0..(1usize << k) {
            let name: String = (0..k)
                .map(|i| {
                    if (pattern >> (k - 1 - i)) & 1 == 1 {
                        '1'
                    } else {
                        '0'
                    }
                })
                .collect();
            let mut projector = ComplexMatrix::zeros(dim, dim);
            for z in 0..dim {
                let matches = self
                    .measured_qubits
                    .iter()
                    .enumerate()
                    .all(|(i, &q)| self.bit_of(z, q) == (pattern >> (k - 1 - i)) & 1);
                if matches {
                    projector.set(z, z, Complex::new(1.0, 0.0));
                }
            }
            output_alphabet.push(name);
            measurements.push(projector);
        }
        Ok(QuantumMealyMachine::new(
            input_alphabet,
            output_alphabet,
            unitaries,
            measurements,
        )?)
    }

    /// Builds one named initial state.
    pub fn initial_state(&self, name: &str) -> Result<DensityOperator, CircuitError> {
        let expr = self
            .states
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, e)| e)
            .ok_or_else(|| CircuitError::UnknownState(name.to_string()))?;
        self.build_state(name, expr)
    }

    /// Builds every named initial state, in declaration order of names.
    pub fn initial_states(&self) -> Result<BTreeMap<String, DensityOperator>, CircuitError> {
        let mut out = BTreeMap::new();
        for (name, expr) in &self.states {
            if out.contains_key(name) {
                return Err(CircuitError::DuplicateName(name.clone()));
            }
            out.insert(name.clone(), self.build_state(name, expr)?);
        }
        Ok(out)
    }

    fn build_state(&self, name: &str, expr: &StateExpr) -> Result<DensityOperator, CircuitError> {
        let dim = self.dimension();
        match expr {
            StateExpr::Ket(bits) => {
                if bits.len() != self.qubit_count {
                    return Err(CircuitError::WrongKetLength {
                        name: name.to_string(),
                        got: bits.len(),
                        expected: self.qubit_count,
                    });
                }
                let index = bits.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize);
                Ok(DensityOperator::basis_state(dim, index))
            }
            StateExpr::Bell { x, y } => {
                if self.qubit_count != 2 {
                    return Err(CircuitError::BellNeedsTwoQubits(self.qubit_count));
                }
                let mut amps = vec![Complex::new(0.0, 0.0); 4];
                let sign = if *x == 1 { -1.0 } else { 1.0 };
                amps[*y as usize] = Complex::new(1.0, 0.0);
                amps[2 + (1 - *y) as usize] = Complex::new(sign, 0.0);
                Ok(DensityOperator::pure(&amps)?)
            }
            StateExpr::Matrix(m) => {
                if m.rows() != dim || m.cols() != dim {
                    return Err(CircuitError::WrongMatrixDimension {
                        name: name.to_string(),
                        got: m.rows(),
                        got2: m.cols(),
                        expected: dim,
                    });
                }
                Ok(DensityOperator::new(m.clone())?)
            }
        }
    }

    fn check_qubit(&self, q: usize) -> Result<(), CircuitError> {
        if q >= self.qubit_count {
            return Err(CircuitError::QubitOutOfRange {
                qubit: q,
                qubits: self.qubit_count,
            });
        }
        Ok(())
    }

    /// Bit of basis index `z` at qubit `q` (qubit 0 is the most
    /// significant bit).
    fn bit_of(&self, z: usize, q: usize) -> usize {
        (z >> (self.qubit_count - 1 - q)) & 1
    }

    fn expand_gate(&self, name: &str, expr: &GateExpr) -> Result<ComplexMatrix, CircuitError> {
        let dim = self.dimension();
        match expr {
            GateExpr::Hadamard(q) => self.embed_single(*q, &single_qubit::hadamard()),
            GateExpr::PauliX(q) => self.embed_single(*q, &single_qubit::pauli_x()),
            GateExpr::PauliZ(q) => self.embed_single(*q, &single_qubit::pauli_z()),
            GateExpr::PhaseS(q) => self.embed_single(*q, &single_qubit::phase_s()),
            GateExpr::ControlledNot { control, target } => {
                self.check_qubit(*control)?;
                self.check_qubit(*target)?;
                if control == target {
                    return Err(CircuitError::ControlEqualsTarget(*control));
                }
                let mut u = ComplexMatrix::zeros(dim, dim);
                for z in 0..dim {
                    let z2 = if self.bit_of(z, *control) == 1 {
                        z ^ (1 << (self.qubit_count - 1 - target))
                    } else {
                        z
                    };
                    u.set(z2, z, Complex::new(1.0, 0.0));
                }
                Ok(u)
            }
            GateExpr::Swap(a, b) => {
                self.check_qubit(*a)?;
                self.check_qubit(*b)?;
                if a == b {
                    return Err(CircuitError::SwapQubitsEqual(*a));
                }
                let mut u = ComplexMatrix::zeros(dim, dim);
                for z in 0..dim {
                    let (ba, bb) = (self.bit_of(z, *a), self.bit_of(z, *b));
                    let mut z2 = z;
                    if ba != bb {
                        z2 ^= 1 << (self.qubit_count - 1 - a);
                        z2 ^= 1 << (self.qubit_count - 1 - b);
                    }
                    u.set(z2, z, Complex::new(1.0, 0.0));
                }
                Ok(u)
            }
            GateExpr::Matrix(m) => {
                if m.rows() != dim || m.cols() != dim {
                    return Err(CircuitError::WrongMatrixDimension {
                        name: name.to_string(),
                        got: m.rows(),
                        got2: m.cols(),
                        expected: dim,
                    });
                }
                Ok(m.clone())
            }
        }
    }

    fn embed_single(&self, q: usize, gate: &ComplexMatrix) -> Result<ComplexMatrix, CircuitError> {
        self.check_qubit(q)?;
        let left = ComplexMatrix::identity(1 << q);
        let right = ComplexMatrix::identity(1 << (self.qubit_count - q - 1));
        Ok(left.kron(gate).kron(&right))
    }
}

mod single_qubit {
    use crate::linalg::{Complex, ComplexMatrix};

    pub fn hadamard() -> ComplexMatrix {
        let s = 1.0 / 2.0f64.sqrt();
        ComplexMatrix::from_real_rows(&[vec![s, s], vec![s, -s]])
    }

    pub fn pauli_x() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]])
    }

    pub fn pauli_z() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[vec![1.0, 0.0], vec![0.0, -1.0]])
    }

    pub fn phase_s() -> ComplexMatrix {
        ComplexMatrix::from_rows(&[
            vec![Complex::new(1.0, 0.0), Complex::new(0.0, 0.0)],
            vec![Complex::new(0.0, 0.0), Complex::new(0.0, 1.0)],
        ])
    }
}

/// Worked example machines, available both here and as `.qmm` files under
/// `machines/`.
pub mod example_machines {
    use super::*;

    /// Two-qubit machine with a controlled-NOT (`C`) and a Hadamard on the
    /// first qubit (`H1`), measuring the first qubit. The states |00⟩ and
    /// |01⟩ are equivalent in it: no experiment separates them.
    pub fn controlled_not_machine() -> (QuantumMealyMachine, BTreeMap<String, DensityOperator>) {
        let spec = controlled_not_spec(false);
        (
            spec.build_machine().expect("example machine is valid"),
            spec.initial_states().expect("example states are valid"),
        )
    }

    /// The controlled-NOT machine extended with a Hadamard on the second
    /// qubit (`H2`). The extra gate makes |00⟩ and |01⟩ distinguishable,
    /// though only by experiments with at least 4 inputs.
    pub fn extended_controlled_not_machine(
    ) -> (QuantumMealyMachine, BTreeMap<String, DensityOperator>) {
        let spec = controlled_not_spec(true);
        (
            spec.build_machine().expect("example machine is valid"),
            spec.initial_states().expect("example states are valid"),
        )
    }

    /// Two-qubit machine with a Hadamard on the first qubit (`H`) and a
    /// swap of the two qubits (`S`), measuring the first qubit. The Bell
    /// states bell00 and bell10 survive every single-measurement
    /// experiment together but are separated with two measurements.
    pub fn swap_hadamard_machine() -> (QuantumMealyMachine, BTreeMap<String, DensityOperator>) {
        let mut spec = MachineSpec::new(2);
        spec.add_gate("H", GateExpr::Hadamard(0))
            .add_gate("S", GateExpr::Swap(0, 1))
            .measure(&[0]);
        for (name, x, y) in [
            ("bell00", 0, 0),
            ("bell01", 0, 1),
            ("bell10", 1, 0),
            ("bell11", 1, 1),
        ] {
            spec.add_state(name, StateExpr::Bell { x, y });
        }
        (
            spec.build_machine().expect("example machine is valid"),
            spec.initial_states().expect("example states are valid"),
        )
    }

    fn controlled_not_spec(with_h2: bool) -> MachineSpec {
        let mut spec = MachineSpec::new(2);
        spec.add_gate("C", GateExpr::ControlledNot { control: 0, target: 1 })
            .add_gate("H1", GateExpr::Hadamard(0));
        if with_h2 {
            spec.add_gate("H2", GateExpr::Hadamard(1));
        }
        spec.measure(&[0])
            .add_state("00", StateExpr::Ket(vec![0, 0]))
            .add_state("01", StateExpr::Ket(vec![0, 1]));
        spec
    }
}
