//! Build a machine from its text description and run an experiment.
//!
//! The `.qmm` format names a circuit's gates, the measured qubits, and
//! a set of initial states; the same files drive the command-line
//! interface. This example parses a machine inline, checks its
//! operators are well-formed, and runs one experiment step by step.
//!
//! Run with `cargo run --example parse_and_validate`.

use qmm::circuits::parse_machine_spec;
use qmm::model::{Experiment, Scheduler};

const DESCRIPTION: &str = "
# A qubit pair with a Hadamard, a swap, and a phase gate,
# measuring the first qubit.
qubits 2

gates
  H = H 0
  S = SWAP 0 1
  P = S 0
end

measure 0

states
  ground = ket 00
  bell   = bell 00
end
";

fn main() {
    let spec = parse_machine_spec(DESCRIPTION).unwrap();
    println!(
        "parsed {} qubits, gates {:?}, measuring qubits {:?}",
        spec.qubit_count(),
        spec.gate_names(),
        spec.measured_qubits()
    );

    let machine = spec.build_machine().unwrap();
    println!(
        "dimension {}, inputs {:?}, outcomes {:?}",
        machine.dimension(),
        machine.input_alphabet(),
        machine.output_alphabet()
    );
    let unitarity = (0..machine.input_alphabet().len())
        .map(|s| machine.unitarity_residual(s))
        .fold(0.0f64, f64::max);
    println!(
        "unitarity residual {:.3e}, completeness residual {:.3e}",
        unitarity,
        machine.completeness_residual()
    );

    // Apply H then S, measure after each input, and ask for the
    // probability of observing outcome 0 both times.
    let h = machine.input_index("H").unwrap();
    let s = machine.input_index("S").unwrap();
    let zero = machine.output_index("0").unwrap();
    let experiment = Experiment::new(
        vec![h, s],
        Scheduler::new(vec![1, 2]).unwrap(),
        vec![zero, zero],
    )
    .unwrap();

    for name in ["ground", "bell"] {
        let state = spec.initial_state(name).unwrap();
        let outcome = machine.run_experiment(&state, &experiment).unwrap();
        let (word, outcomes) = experiment.render(&machine);
        println!("from {name}: P[{word} -> {outcomes}] = {:.6}", outcome.probability);
    }
}
