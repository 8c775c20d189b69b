//! Encode "is there a smaller equivalent machine?" as polynomial
//! equations, and check a candidate solution against them.
//!
//! Whether a machine with a given initial state admits an equivalent
//! machine of dimension d is expressible as the solvability of a system
//! of polynomial equations of degree at most 3 over the reals, which
//! places minimisation in PSPACE. This example builds the system for
//! the controlled-NOT machine, prints its shape, and then verifies a
//! known solution: the machine itself (padded to the same dimension)
//! with the equivalent state |01⟩ standing in for |00⟩.
//!
//! Run with `cargo run --example minimise_encoding`.

use qmm::circuits::example_machines::{controlled_not_machine, extended_controlled_not_machine};
use qmm::minimise::{
    construct_witness, encode_problem1, encode_problem2, verify_assignment, Condition,
    VerificationReport,
};

fn main() {
    let (machine, states) = controlled_not_machine();

    // Shape of the decision problem for a 3-dimensional candidate.
    let unbounded = encode_problem1(&machine, &states["00"], 3).unwrap();
    println!("unbounded, candidate dimension 3:");
    println!(
        "  {} variables, {} constraints, {} monomials, max degree {}",
        unbounded.variable_count(),
        unbounded.constraint_count(),
        unbounded.monomial_count(),
        unbounded.max_degree()
    );
    let budgeted = encode_problem2(&machine, &states["00"], 2, 3).unwrap();
    println!("two-measurement budget, candidate dimension 3:");
    println!(
        "  {} variables, {} constraints, {} monomials, max degree {}",
        budgeted.variable_count(),
        budgeted.constraint_count(),
        budgeted.monomial_count(),
        budgeted.max_degree()
    );
    println!("\nfirst lines of the text form:");
    for line in budgeted.to_text().lines().take(6) {
        println!("  {line}");
    }

    // A certificate that the system is satisfiable when an equivalent
    // candidate of the target dimension exists: build the assignment
    // from the candidate and evaluate every constraint.
    let system = encode_problem2(&machine, &states["00"], 2, machine.dimension()).unwrap();
    let assignment =
        construct_witness(&machine, &states["00"], &machine, &states["01"], Some(2)).unwrap();
    let report = verify_assignment(&system, &assignment).unwrap();
    println!(
        "\nequivalent candidate: max residual {:.3e} over {} constraints ({})",
        report.max_residual(),
        report.entries().len(),
        if report.passes() { "satisfied" } else { "violated" }
    );

    // An inequivalent candidate fails, and it fails exactly at the
    // trace conditions pinning the observable statistics.
    let (extended, others) = extended_controlled_not_machine();
    let system = encode_problem2(&extended, &others["00"], 2, extended.dimension()).unwrap();
    let assignment =
        construct_witness(&extended, &others["00"], &extended, &others["01"], Some(2)).unwrap();
    let report = verify_assignment(&system, &assignment).unwrap();
    println!(
        "inequivalent candidate: max residual {:.3e} ({})",
        report.max_residual(),
        if report.passes() { "satisfied" } else { "violated" }
    );
    let worst = report.worst().expect("some constraint is violated");
    println!(
        "  worst violation: {} [{}], residual {:.3e}",
        worst.label(),
        worst.condition().slug(),
        worst.residual()
    );
    assert!(report
        .violations()
        .all(|entry| entry.condition() == Condition::TraceOrthogonality));
    println!(
        "  all {} violations are trace-orthogonality conditions (tolerance {:.0e})",
        report.violations().count(),
        VerificationReport::TOLERANCE
    );
}
