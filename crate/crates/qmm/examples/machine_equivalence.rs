//! Equivalence of two different machines.
//!
//! Conjugating every operator of a machine by a fixed unitary W and
//! rotating the initial state the same way changes nothing observable.
//! The checker confirms this by running on the direct sum of the two
//! machines. Perturbing one gate of the rotated copy breaks the
//! equivalence and yields a concrete experiment telling them apart.
//!
//! Run with `cargo run --example machine_equivalence`.

use qmm::circuits::random::{random_circuit_machine, random_density, random_unitary};
use qmm::equivalence::check_machines;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let machine = random_circuit_machine(2, 2, 3, false, &mut rng);
    let rho = random_density(machine.dimension(), &mut rng);

    let w = random_unitary(machine.dimension(), &mut rng);
    let rotated = machine.change_basis(&w).unwrap();
    let rho_rotated = qmm::model::DensityOperator::new(rho.matrix().conjugate_by(&w)).unwrap();

    let verdict = check_machines(&machine, &rho, &rotated, &rho_rotated).unwrap();
    println!(
        "machine vs basis-rotated copy: {}",
        if verdict.equivalent { "equivalent" } else { "not equivalent" }
    );
    println!(
        "  joint space bound {}, basis reached {}",
        verdict.bound,
        verdict.basis_size()
    );

    // Nudge one gate of the copy by a 0.15 rad rotation on the first
    // amplitude pair. Observably different machines result.
    let perturbed = {
        let angle = 0.15f64;
        let mut rotation = qmm::linalg::ComplexMatrix::identity(machine.dimension());
        rotation.set(0, 0, qmm::linalg::Complex::new(angle.cos(), 0.0));
        rotation.set(0, 1, qmm::linalg::Complex::new(angle.sin(), 0.0));
        rotation.set(1, 0, qmm::linalg::Complex::new(-angle.sin(), 0.0));
        rotation.set(1, 1, qmm::linalg::Complex::new(angle.cos(), 0.0));
        let mut unitaries: Vec<_> = (0..rotated.input_alphabet().len())
            .map(|s| rotated.unitary(s).clone())
            .collect();
        unitaries[0] = rotation.matmul(&unitaries[0]);
        let measurements: Vec<_> = (0..rotated.output_alphabet().len())
            .map(|g| rotated.measurement(g).clone())
            .collect();
        qmm::model::QuantumMealyMachine::new(
            rotated.input_alphabet().to_vec(),
            rotated.output_alphabet().to_vec(),
            unitaries,
            measurements,
        )
        .unwrap()
    };
    let verdict = check_machines(&machine, &rho, &perturbed, &rho_rotated).unwrap();
    println!(
        "machine vs perturbed copy: {}",
        if verdict.equivalent { "equivalent" } else { "not equivalent" }
    );
    if let Some(witness) = &verdict.witness {
        let (word, outcomes) = witness.experiment.render(&machine);
        println!(
            "  witness: word {word}, schedule {:?}, outcomes {outcomes}, gap {:.3e}",
            witness.experiment.scheduler().points(),
            witness.gap()
        );
    }
}
