//! Seeded random machine generators and the named benchmark suite.

use super::example_machines;
use super::{GateExpr, MachineSpec};
use crate::linalg::{Complex, ComplexMatrix};
use crate::model::{DensityOperator, QuantumMealyMachine};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn gaussian(rng: &mut impl Rng) -> f64 {
    rng.sample(StandardNormal)
}

fn gaussian_complex(rng: &mut impl Rng, real: bool) -> Complex {
    if real {
        Complex::new(gaussian(rng), 0.0)
    } else {
        Complex::new(gaussian(rng), gaussian(rng))
    }
}

/// Orthonormal vectors of the given length via modified Gram-Schmidt on
/// Gaussian samples, with a second projection pass for stability.
fn orthonormal_vectors(
    len: usize,
    count: usize,
    real: bool,
    rng: &mut impl Rng,
) -> Vec<Vec<Complex>> {
    assert!(count <= len);
    let mut basis: Vec<Vec<Complex>> = Vec::with_capacity(count);
    while basis.len() < count {
        let mut v: Vec<Complex> = (0..len).map(|_| gaussian_complex(rng, real)).collect();
        for _ in 0..2 {
            for q in &basis {
                let dot: Complex = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= dot * qi;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        // A Gaussian sample is dependent on the basis with probability 0;
        // resample on the numerical near-miss.
        if norm < 1e-8 {
            continue;
        }
        for vi in &mut v {
            *vi /= norm;
        }
        basis.push(v);
    }
    basis
}

fn from_columns(rows: usize, columns: &[Vec<Complex>]) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, columns.len(), |r, c| columns[c][r])
}

/// Random dim x dim unitary (orthonormalized Gaussian columns).
pub fn random_unitary(dim: usize, rng: &mut impl Rng) -> ComplexMatrix {
    from_columns(dim, &orthonormal_vectors(dim, dim, false, rng))
}

/// Random dim x dim real orthogonal matrix.
pub fn random_real_orthogonal(dim: usize, rng: &mut impl Rng) -> ComplexMatrix {
    from_columns(dim, &orthonormal_vectors(dim, dim, true, rng))
}

/// Random measurement family: `outputs` operators with sum M†M = I,
/// cut row-block-wise from a random (outputs·dim) x dim isometry.
pub fn random_measurement_family(
    dim: usize,
    outputs: usize,
    real: bool,
    rng: &mut impl Rng,
) -> Vec<ComplexMatrix> {
    let columns = orthonormal_vectors(outputs * dim, dim, real, rng);
    (0..outputs)
        .map(|m| ComplexMatrix::from_fn(dim, dim, |r, c| columns[c][m * dim + r]))
        .collect()
}

/// Random density operator GG†/tr(GG†) from a Gaussian G.
pub fn random_density(dim: usize, rng: &mut impl Rng) -> DensityOperator {
    let g = ComplexMatrix::from_fn(dim, dim, |_, _| gaussian_complex(rng, false));
    let rho = g.matmul(&g.adjoint());
    let trace = rho.trace().re;
    DensityOperator::new(rho.scale(Complex::new(1.0 / trace, 0.0)))
        .expect("GG†/tr(GG†) is a valid density operator")
}

/// Random machine of arbitrary dimension with Haar-style unitaries and a
/// random measurement family. Inputs are named a, b, ...; outputs 0, 1, ...
pub fn random_machine(
    dim: usize,
    input_count: usize,
    output_count: usize,
    real: bool,
    rng: &mut impl Rng,
) -> QuantumMealyMachine {
    assert!((1..=26).contains(&input_count) && (1..=10).contains(&output_count));
    let inputs: Vec<String> = (0..input_count)
        .map(|i| ((b'a' + i as u8) as char).to_string())
        .collect();
    let outputs: Vec<String> = (0..output_count).map(|m| m.to_string()).collect();
    let unitaries: Vec<ComplexMatrix> = (0..input_count)
        .map(|_| {
            if real {
                random_real_orthogonal(dim, rng)
            } else {
                random_unitary(dim, rng)
            }
        })
        .collect();
    let measurements = random_measurement_family(dim, output_count, real, rng);
    QuantumMealyMachine::new(inputs, outputs, unitaries, measurements)
        .expect("generated operators satisfy the machine invariants")
}

/// Random circuit-structured machine on `qubits` qubits: every input symbol
/// is a product of `depth` elementary gates (H/S/CNOT, or H/X/CNOT when
/// `real`), and qubit 0 is measured in the computational basis.
pub fn random_circuit_machine(
    qubits: usize,
    input_count: usize,
    depth: usize,
    real: bool,
    rng: &mut impl Rng,
) -> QuantumMealyMachine {
    assert!(qubits >= 1 && (1..=26).contains(&input_count));
    let mut spec = MachineSpec::new(qubits);
    let dim = spec.dimension();
    for i in 0..input_count {
        let mut u = ComplexMatrix::identity(dim);
        for _ in 0..depth {
            let gate = spec
                .expand_gate("generated", &random_gate(qubits, real, rng))
                .expect("generated gates are in range");
            // Elementary gates are sparse; keeping them on the left makes
            // the product cheap.
            u = gate.matmul(&u);
        }
        let name = ((b'a' + i as u8) as char).to_string();
        spec.add_gate(&name, GateExpr::Matrix(u));
    }
    spec.measure(&[0]);
    spec.build_machine()
        .expect("gate products remain unitary and the projectors are complete")
}

fn random_gate(qubits: usize, real: bool, rng: &mut impl Rng) -> GateExpr {
    let kinds = if qubits == 1 { 2 } else { 3 };
    match rng.gen_range(0..kinds) {
        0 => GateExpr::Hadamard(rng.gen_range(0..qubits)),
        1 => {
            let q = rng.gen_range(0..qubits);
            if real {
                GateExpr::PauliX(q)
            } else {
                GateExpr::PhaseS(q)
            }
        }
        _ => {
            let control = rng.gen_range(0..qubits);
            let mut target = rng.gen_range(0..qubits - 1);
            if target >= control {
                target += 1;
            }
            GateExpr::ControlledNot { control, target }
        }
    }
}

/// One benchmark case: a machine, a pair of initial states, and the known
/// verdict where one is established.
pub struct BenchCase {
    pub name: String,
    pub machine: QuantumMealyMachine,
    pub state_s: DensityOperator,
    pub state_t: DensityOperator,
    pub expected_equivalent: Option<bool>,
}

const BENCH_SEED: u64 = 0x514e_0b01;

/// The named benchmark suite: the worked two-qubit examples plus seeded
/// circuit machines of dimension 2 through 32. Deterministic across runs.
pub fn benchmark_suite() -> Vec<BenchCase> {
    let mut cases = Vec::new();

    let (machine, states) = example_machines::controlled_not_machine();
    cases.push(BenchCase {
        name: "example1-m".into(),
        machine,
        state_s: states["00"].clone(),
        state_t: states["01"].clone(),
        expected_equivalent: Some(true),
    });

    let (machine, states) = example_machines::extended_controlled_not_machine();
    cases.push(BenchCase {
        name: "example1-mprime".into(),
        machine,
        state_s: states["00"].clone(),
        state_t: states["01"].clone(),
        expected_equivalent: Some(false),
    });

    let (machine, states) = example_machines::swap_hadamard_machine();
    cases.push(BenchCase {
        name: "example2".into(),
        machine,
        state_s: states["bell00"].clone(),
        state_t: states["bell10"].clone(),
        expected_equivalent: Some(false),
    });

    for qubits in 1..=5usize {
        let dim = 1 << qubits;
        // The largest case runs in real mode, which halves the tracked
        // ambient dimension and exercises that code path at scale.
        let real = qubits == 5;
        let mut rng = ChaCha8Rng::seed_from_u64(BENCH_SEED + qubits as u64);
        let machine = random_circuit_machine(qubits, 2, 3 * qubits + 2, real, &mut rng);
        cases.push(BenchCase {
            name: format!("gen-n{dim}"),
            machine,
            state_s: DensityOperator::basis_state(dim, 0),
            state_t: DensityOperator::basis_state(dim, 1),
            expected_equivalent: None,
        });
    }

    cases
}
