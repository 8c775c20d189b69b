//! Quantum Mealy machines: simulation, equivalence checking, and
//! minimisation constraint systems.
//!
//! A quantum Mealy machine reads input symbols, evolves a density operator
//! by a unitary per symbol, and on demand performs a measurement that emits
//! an output symbol. Two states are equivalent when no experiment (a word,
//! a schedule of measurement points, and an outcome sequence) can tell them
//! apart. This crate provides:
//!
//! - [`model`]: machines, density operators, schedulers, experiments, and
//!   the operators they induce.
//! - [`linalg`]: the dense complex matrix kernel and the lazy orthogonal
//!   span tracker that makes equivalence checking O(m·n⁶).
//! - [`equivalence`]: state and machine equivalence checkers, bounded
//!   (measurement-budgeted) variants, a quadratically slower baseline for
//!   benchmarking, and distinguishing-experiment extraction.
//! - [`oracle`]: definition-level brute force: exhaustive experiment
//!   enumeration, probability comparison, and span-growth profiles.
//! - [`minimise`]: encodings of "is there an equivalent machine of
//!   dimension d?" as systems of degree-≤3 polynomial equalities, plus
//!   witness construction and assignment verification.
//! - [`circuits`]: a line-oriented `.qmm` machine description format,
//!   gate-level machine construction, worked example machines, and the
//!   benchmark suite.
//!
//! # Quick start
//!
//! ```
//! use qmm::circuits::example_machines;
//! use qmm::equivalence::check_states;
//!
//! // A two-qubit machine where |00⟩ and |01⟩ answer every experiment
//! // with identical probabilities.
//! let (machine, states) = example_machines::controlled_not_machine();
//! let verdict = check_states(&machine, &states["00"], &states["01"]).unwrap();
//! assert!(verdict.equivalent);
//! ```
//!
//! Each major capability has a runnable example under `examples/`; start
//! with `cargo run --example check_states`.

pub mod circuits;
pub mod cli;
pub mod equivalence;
pub mod linalg;
pub mod minimise;
pub mod model;
pub mod oracle;

pub use linalg::{ComplexMatrix, SpanTracker};
pub use model::{DensityOperator, Experiment, QuantumMealyMachine, Scheduler};
