//! Decide whether two initial states of a machine are equivalent, and
//! replay the distinguishing experiment when they are not.
//!
//! The machine is a two-qubit circuit with a controlled-NOT and a
//! Hadamard on the first qubit, measuring the first qubit. |00⟩ and
//! |01⟩ are equivalent in it. Adding a Hadamard on the second qubit
//! makes them distinguishable, but only by an experiment of size 5.
//!
//! Run with `cargo run --example check_states`.

use qmm::circuits::example_machines::{controlled_not_machine, extended_controlled_not_machine};
use qmm::equivalence::check_states;

fn main() {
    let (machine, states) = controlled_not_machine();
    let verdict = check_states(&machine, &states["00"], &states["01"]).unwrap();
    println!(
        "controlled-NOT machine, |00> vs |01>: {}",
        if verdict.equivalent { "equivalent" } else { "not equivalent" }
    );
    println!(
        "  explored a basis of {} operators (bound {})",
        verdict.basis_size(),
        verdict.bound
    );

    let (extended, states) = extended_controlled_not_machine();
    let verdict = check_states(&extended, &states["00"], &states["01"]).unwrap();
    println!(
        "extended with H on the second qubit: {}",
        if verdict.equivalent { "equivalent" } else { "not equivalent" }
    );
    let witness = verdict.witness.expect("inequivalent pairs carry a witness");
    let (word, outcomes) = witness.experiment.render(&extended);
    println!("  witness word: {word}");
    println!("  measured after inputs: {:?}", witness.experiment.scheduler().points());
    println!("  observed outcomes: {outcomes}");

    // Replay it to confirm: the probability of seeing those outcomes
    // differs between the two initial states.
    let p_s = extended
        .run_experiment(&states["00"], &witness.experiment)
        .unwrap()
        .probability;
    let p_t = extended
        .run_experiment(&states["01"], &witness.experiment)
        .unwrap()
        .probability;
    println!("  replayed probabilities: {p_s:.6} from |00>, {p_t:.6} from |01>");
    assert!((p_s - witness.prob_s).abs() < 1e-12);
    assert!((p_t - witness.prob_t).abs() < 1e-12);
}
