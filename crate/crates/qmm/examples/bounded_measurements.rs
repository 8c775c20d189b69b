//! Equivalence under a bounded number of measurements.
//!
//! Two Bell states of a Hadamard-and-swap machine produce identical
//! statistics in every experiment that measures at most once, yet a
//! two-measurement experiment separates them. The budgeted checker
//! keeps one operator basis per measurement count, so it certifies
//! both facts.
//!
//! Run with `cargo run --example bounded_measurements`.

use qmm::circuits::example_machines::swap_hadamard_machine;
use qmm::equivalence::check_states_k;

fn main() {
    let (machine, states) = swap_hadamard_machine();
    let (bell00, bell10) = (&states["bell00"], &states["bell10"]);

    for k in 1..=3 {
        let verdict = check_states_k(&machine, bell00, bell10, k).unwrap();
        print!(
            "at most {k} measurement{}: {}",
            if k == 1 { "" } else { "s" },
            if verdict.equivalent { "equivalent" } else { "NOT equivalent" }
        );
        println!("  (basis sizes per level: {:?})", verdict.basis_sizes);
        if let Some(witness) = &verdict.witness {
            let (word, outcomes) = witness.experiment.render(&machine);
            println!(
                "  separated by word {word}, measuring after inputs {:?}, outcomes {outcomes}",
                witness.experiment.scheduler().points()
            );
            println!(
                "  probabilities {:.6} vs {:.6}, gap {:.3e}",
                witness.prob_s,
                witness.prob_t,
                witness.gap()
            );
        }
    }
}
