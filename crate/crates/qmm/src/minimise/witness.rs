//! Satisfying assignments built from a known equivalent pair.
//!
//! The encodings ask for column families spanning the reachable operators
//! of the joint system. When an equivalent pair is already in hand, those
//! families can be computed outright: run the span search on the direct
//! sum seeded with ρ₁ ⊕ ρ₂ (the sum this time, not the difference, since
//! the columns must carry both blocks), store one accepted operator per
//! column, and solve small least-squares systems for the coefficient
//! matrices. The result exercises every constraint the encoders emit.

use std::collections::VecDeque;

use crate::linalg::{solve_dense, Complex, ComplexMatrix, SpanTracker};
use crate::model::{DensityOperator, QuantumMealyMachine};

use super::names;
use super::{Assignment, MinimiseError};

/// Builds an assignment for the system encoding `(m1, rho1)` against
/// candidates of dimension `m2.dimension()`: [`encode_problem2`] with
/// budget `k = Some(k)`, [`encode_problem1`] with `k = None`.
///
/// The assignment satisfies the system exactly when the two pairs are
/// equivalent (under the given budget); for inequivalent pairs the
/// structural and well-formedness constraints still hold, and the failure
/// shows up in the block-trace constraints.
///
/// [`encode_problem1`]: super::encode_problem1
/// [`encode_problem2`]: super::encode_problem2
pub fn construct_witness(
    m1: &QuantumMealyMachine,
    rho1: &DensityOperator,
    m2: &QuantumMealyMachine,
    rho2: &DensityOperator,
    k: Option<usize>,
) -> Result<Assignment, MinimiseError> {
    if rho1.dimension() != m1.dimension() {
        return Err(MinimiseError::DimensionMismatch {
            state: rho1.dimension(),
            machine: m1.dimension(),
        });
    }
    if rho2.dimension() != m2.dimension() {
        return Err(MinimiseError::DimensionMismatch {
            state: rho2.dimension(),
            machine: m2.dimension(),
        });
    }
    if k == Some(0) {
        return Err(MinimiseError::ZeroBudget);
    }

    // Align the candidate's symbols with the reference order; the direct
    // sum and the variable indexing both assume it.
    let m2 = m2.with_symbol_order(m1.input_alphabet(), m1.output_alphabet())?;
    let sum = m1.direct_sum(&m2)?;
    let n1 = m1.dimension();
    let n2 = m2.dimension();
    let b1 = n1 * n1;
    let nn = b1 + n2 * n2;
    let inputs = sum.input_alphabet().len();
    let outputs = sum.output_alphabet().len();
    let levels = k.map_or(1, |kk| kk + 1);
    let level_tag = |l: usize| k.map(|_| l);

    let seed = rho1.matrix().direct_sum(rho2.matrix());
    let lists = collect_column_lists(&sum, &seed, k, nn, levels);

    let mut assignment = Assignment::new();
    for s in 0..inputs {
        let u = m2.unitary(s);
        for i in 0..n2 {
            for j in 0..n2 {
                assignment.set_complex(&names::unitary(s, i, j), u.get(i, j));
            }
        }
    }
    for g in 0..outputs {
        let m = m2.measurement(g);
        for i in 0..n2 {
            for j in 0..n2 {
                assignment.set_complex(&names::measurement(g, i, j), m.get(i, j));
            }
        }
    }
    let factor = rho2
        .matrix()
        .psd_factor(1e-9)
        .expect("validated density operators factor");
    for i in 0..n2 {
        for j in 0..n2 {
            assignment.set_complex(&names::state_factor(i, j), factor.get(i, j));
        }
    }

    for (l, list) in lists.iter().enumerate() {
        for (c, op) in list.iter().enumerate() {
            for r in 0..nn {
                let value = stacked_entry(op, n1, n2, r);
                assignment.set_complex(&names::column_stack(level_tag(l), r, c), value);
            }
        }
    }

    // Coefficient matrices: express each evolved column in the target
    // list by solving the normal equations on its Gram matrix. Padded
    // duplicate columns make the Gram exactly singular; the dense solver
    // skips those pivots and leaves their coefficients at zero.
    let grams: Vec<Vec<Vec<Complex>>> = lists.iter().map(|list| gram(list)).collect();
    for (l, list) in lists.iter().enumerate() {
        for s in 0..inputs {
            let u = sum.unitary(s);
            for (c, op) in list.iter().enumerate() {
                let evolved = op.conjugate_by(u);
                let coefs = expand(list, &grams[l], &evolved);
                for (x, alpha) in coefs.iter().enumerate() {
                    assignment.set(names::input_coef(s, level_tag(l), x, c), alpha.re);
                }
            }
        }
    }
    let step_levels = k.map_or(1, |kk| kk);
    for l in 0..step_levels {
        let next = if k.is_some() { l + 1 } else { 0 };
        for g in 0..outputs {
            let m = sum.measurement(g);
            for (c, op) in lists[l].iter().enumerate() {
                let evolved = op.conjugate_by(m);
                let coefs = expand(&lists[next], &grams[next], &evolved);
                for (x, alpha) in coefs.iter().enumerate() {
                    assignment.set(names::output_coef(g, level_tag(l), x, c), alpha.re);
                }
            }
        }
    }
    Ok(assignment)
}

/// Breadth-first span collection on the joint machine, one operator list
/// per measurement count (a single list when `budget` is `None`). Each
/// list starts with the raw seed, continues with unit-normalized accepted
/// operators, and is padded to `ambient` columns by repeating its last
/// element.
fn collect_column_lists(
    machine: &QuantumMealyMachine,
    seed: &ComplexMatrix,
    budget: Option<usize>,
    ambient: usize,
    levels: usize,
) -> Vec<Vec<ComplexMatrix>> {
    let mut trackers: Vec<SpanTracker> = (0..levels).map(|_| SpanTracker::new(ambient)).collect();
    let mut lists: Vec<Vec<ComplexMatrix>> = vec![Vec::new(); levels];
    let mut queue: VecDeque<(ComplexMatrix, usize)> = VecDeque::new();
    queue.push_back((seed.clone(), 0));
    let inputs = machine.input_alphabet().len();
    let outputs = machine.output_alphabet().len();
    while let Some((op, used)) = queue.pop_front() {
        let slot = if budget.is_some() { used } else { 0 };
        if !trackers[slot].extend(&op) {
            continue;
        }
        let stored = if lists[slot].is_empty() {
            op.clone()
        } else {
            op.scale(Complex::new(1.0 / op.frobenius_norm(), 0.0))
        };
        lists[slot].push(stored.clone());
        // Span containment is monotone upward, so copy until the first
        // level that already covers the operator.
        for upper in (slot + 1)..levels {
            if !trackers[upper].extend(&op) {
                break;
            }
            lists[upper].push(stored.clone());
        }
        for s in 0..inputs {
            queue.push_back((stored.conjugate_by(machine.unitary(s)), used));
        }
        if budget.map_or(true, |kk| used < kk) {
            for g in 0..outputs {
                queue.push_back((stored.conjugate_by(machine.measurement(g)), used + 1));
            }
        }
    }
    for list in &mut lists {
        assert!(!list.is_empty(), "the seed operator enters every level");
        while list.len() < ambient {
            let last = list.last().expect("nonempty list").clone();
            list.push(last);
        }
    }
    lists
}

/// Entry r of the stacked vectorization [vec(upper block); vec(lower
/// block)] of a block-diagonal operator on the joint space.
fn stacked_entry(op: &ComplexMatrix, n1: usize, n2: usize, r: usize) -> Complex {
    let b1 = n1 * n1;
    if r < b1 {
        op.get(r / n1, r % n1)
    } else {
        let p = r - b1;
        op.get(n1 + p / n2, n1 + p % n2)
    }
}

fn gram(list: &[ComplexMatrix]) -> Vec<Vec<Complex>> {
    (0..list.len())
        .map(|i| {
            (0..list.len())
                .map(|j| list[i].frobenius_inner(&list[j]))
                .collect()
        })
        .collect()
}

/// Least-squares coefficients expressing `target` in `list`.
fn expand(list: &[ComplexMatrix], gram: &[Vec<Complex>], target: &ComplexMatrix) -> Vec<Complex> {
    let h: Vec<Complex> = list.iter().map(|e| e.frobenius_inner(target)).collect();
    solve_dense(gram.to_vec(), h)
}

#[cfg(test)]
mod tests {
    use super::super::{
        encode_problem1, encode_problem2, verify_assignment, Condition, MinimiseError,
    };
    use super::*;
    use crate::circuits::random::{random_density, random_machine, random_unitary};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn projective_machine(unitary: ComplexMatrix) -> QuantumMealyMachine {
        let m0 = ComplexMatrix::from_real_rows(&[vec![1.0, 0.0], vec![0.0, 0.0]]);
        let m1 = ComplexMatrix::from_real_rows(&[vec![0.0, 0.0], vec![0.0, 1.0]]);
        QuantumMealyMachine::new(
            vec!["a".into()],
            vec!["0".into(), "1".into()],
            vec![unitary],
            vec![m0, m1],
        )
        .unwrap()
    }

    #[test]
    fn identity_machine_satisfies_its_own_unbounded_encoding() {
        let machine = projective_machine(ComplexMatrix::identity(2));
        let state = DensityOperator::basis_state(2, 0);
        let system = encode_problem1(&machine, &state, 2).unwrap();
        let assignment = construct_witness(&machine, &state, &machine, &state, None).unwrap();
        let report = verify_assignment(&system, &assignment).unwrap();
        assert!(report.passes(), "max residual {}", report.max_residual());
    }

    #[test]
    fn rotated_copy_satisfies_the_bounded_encoding() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let machine = random_machine(2, 2, 2, false, &mut rng);
        let state = random_density(2, &mut rng);
        let w = random_unitary(2, &mut rng);
        let rotated = machine.change_basis(&w).unwrap();
        let rotated_state = DensityOperator::new(state.matrix().conjugate_by(&w)).unwrap();
        let system = encode_problem2(&machine, &state, 2, 2).unwrap();
        let assignment =
            construct_witness(&machine, &state, &rotated, &rotated_state, Some(2)).unwrap();
        let report = verify_assignment(&system, &assignment).unwrap();
        assert!(report.passes(), "max residual {}", report.max_residual());
    }

    #[test]
    fn inequivalent_pair_fails_only_at_block_traces() {
        let identity = projective_machine(ComplexMatrix::identity(2));
        let flip =
            projective_machine(ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![
                1.0, 0.0,
            ]]));
        let state = DensityOperator::basis_state(2, 0);
        let system = encode_problem2(&identity, &state, 2, 2).unwrap();
        let assignment = construct_witness(&identity, &state, &flip, &state, Some(2)).unwrap();
        let report = verify_assignment(&system, &assignment).unwrap();
        assert!(!report.passes());
        let mut saw_violation = false;
        for violation in report.violations() {
            saw_violation = true;
            assert_eq!(violation.condition(), Condition::TraceOrthogonality);
        }
        assert!(saw_violation);
    }

    #[test]
    fn candidate_symbols_follow_the_reference_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let machine = random_machine(2, 2, 2, false, &mut rng);
        let state = random_density(2, &mut rng);
        let inputs: Vec<String> = machine.input_alphabet().iter().rev().cloned().collect();
        let outputs: Vec<String> = machine.output_alphabet().iter().rev().cloned().collect();
        let shuffled = machine.with_symbol_order(&inputs, &outputs).unwrap();
        let system = encode_problem1(&machine, &state, 2).unwrap();
        let assignment = construct_witness(&machine, &state, &shuffled, &state, None).unwrap();
        let report = verify_assignment(&system, &assignment).unwrap();
        assert!(report.passes(), "max residual {}", report.max_residual());
    }

    #[test]
    fn witness_rejects_malformed_requests() {
        let machine = projective_machine(ComplexMatrix::identity(2));
        let state = DensityOperator::basis_state(2, 0);
        let wide = DensityOperator::basis_state(3, 0);
        assert!(matches!(
            construct_witness(&machine, &wide, &machine, &state, None),
            Err(MinimiseError::DimensionMismatch {
                state: 3,
                machine: 2
            })
        ));
        assert!(matches!(
            construct_witness(&machine, &state, &machine, &wide, None),
            Err(MinimiseError::DimensionMismatch {
                state: 3,
                machine: 2
            })
        ));
        assert!(matches!(
            construct_witness(&machine, &state, &machine, &state, Some(0)),
            Err(MinimiseError::ZeroBudget)
        ));
    }
}
