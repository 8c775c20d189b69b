//! Equivalence checking for states and machines.
//!
//! Two states of a machine are equivalent when every experiment assigns
//! them the same probability. Deciding that by enumerating experiments is
//! exponential in the Hilbert-space dimension n, but the probability gap
//! of an experiment is the trace of a fixed operator: the seed ρs − ρt
//! pushed through the experiment's unitaries and measurement operators.
//! The reachable operators live in the n²-dimensional space of Hermitian
//! matrices, so a breadth-first search that keeps only span-independent
//! operators visits at most n² of them and terminates in O(m·n⁶) time for
//! m input symbols. The states are equivalent exactly when every reachable
//! operator is traceless; a non-traceless one unwinds into a concrete
//! distinguishing experiment of size at most n² − 1.
//!
//! For machines whose unitaries and measurement operators are all real,
//! the reachable operators are real symmetric, the ambient dimension drops
//! to n(n+1)/2, and the bounds shrink accordingly. [`CheckOptions`] can
//! force the complex-case bounds for comparison.
//!
//! Bounded variants ([`check_states_k`]) decide equivalence under a budget
//! of k measurement points by keeping one basis per measurement count;
//! machine-level checking ([`check_machines`]) runs the same search on the
//! direct sum of the two machines.

use std::collections::VecDeque;

use thiserror::Error;

use crate::linalg::{solve_dense, Complex, ComplexMatrix, SpanTracker};
use crate::model::{DensityOperator, Experiment, ModelError, QuantumMealyMachine};

#[derive(Debug, Error)]
pub enum EquivalenceError {
    #[error("state dimension {state} does not match machine dimension {machine}")]
    DimensionMismatch { state: usize, machine: usize },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Numeric knobs for the checkers. The defaults decide all shipped
/// examples and benchmarks with margins of several orders of magnitude.
#[derive(Clone, Debug)]
pub struct CheckOptions {
    /// Relative squared-residual tolerance for span membership.
    pub span_tolerance: f64,
    /// Absolute trace magnitude above which a reachable operator counts as
    /// a probability gap. Genuine gaps in the shipped examples are ≥ 0.05;
    /// numerical noise stays below 10⁻¹².
    pub trace_tolerance: f64,
    /// Use complex-case bounds even for a machine with all-real operators.
    pub force_complex: bool,
}

impl CheckOptions {
    pub const DEFAULT_TRACE_TOLERANCE: f64 = 1e-8;
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            span_tolerance: SpanTracker::DEFAULT_TOLERANCE,
            trace_tolerance: Self::DEFAULT_TRACE_TOLERANCE,
            force_complex: false,
        }
    }
}

/// A distinguishing experiment together with the probabilities it assigns
/// to the two checked states.
#[derive(Clone, Debug)]
pub struct Witness {
    pub experiment: Experiment,
    pub prob_s: f64,
    pub prob_t: f64,
}

impl Witness {
    /// Absolute probability gap. Positive for every produced witness.
    pub fn gap(&self) -> f64 {
        (self.prob_s - self.prob_t).abs()
    }
}

/// Outcome of an equivalence check.
#[derive(Clone, Debug)]
pub struct Verdict {
    pub equivalent: bool,
    /// A replayed distinguishing experiment when `equivalent` is false.
    pub witness: Option<Witness>,
    /// Final basis size per measurement-count layer; a single entry for
    /// the unbounded checks.
    pub basis_sizes: Vec<usize>,
    /// Experiment-size bound that suffices for the decision: n² − 1, or
    /// n(n+1)/2 − 1 in real mode, summed plus one for machine pairs.
    pub bound: usize,
    /// Whether the search ran in the real-operator space.
    pub real_mode: bool,
}

impl Verdict {
    /// Number of basis elements the search kept, maximised over layers.
    pub fn basis_size(&self) -> usize {
        self.basis_sizes.iter().copied().max().unwrap_or(0)
    }

    /// Dimension of the operator space the basis lives in (`bound` + 1).
    pub fn max_basis_size(&self) -> usize {
        self.bound + 1
    }
}

/// Experiments of this size suffice to distinguish two inequivalent states
/// of an n-dimensional machine: n² − 1, or n(n+1)/2 − 1 when the search
/// runs on real symmetric operators.
pub fn experiment_bound(dimension: usize, real_mode: bool) -> usize {
    if real_mode {
        dimension * (dimension + 1) / 2 - 1
    } else {
        dimension * dimension - 1
    }
}

/// Growing span of accepted operators. The two implementations answer the
/// same membership question; they differ only in query cost.
trait SpanStore {
    /// Adds `op` when it is independent of the stored span and capacity
    /// remains; returns whether the span grew.
    fn insert(&mut self, op: &ComplexMatrix) -> bool;
    fn len(&self) -> usize;
}

impl SpanStore for SpanTracker {
    fn insert(&mut self, op: &ComplexMatrix) -> bool {
        self.extend(op)
    }

    fn len(&self) -> usize {
        self.len()
    }
}

/// Baseline store for benchmarking: keeps the accepted operators raw and
/// answers each membership query by Gaussian elimination on their Gram
/// matrix, so a query against B operators costs O(B³) arithmetic on top of
/// the O(B·n²) inner products. The tracker answers the same query in
/// O(B·n²). The Gram matrix itself is extended incrementally; only the
/// elimination is redone per query, which is where the asymptotic gap
/// lives.
///
/// The raw operators are unit-normalized but not orthogonal, so the Gram
/// matrix can be ill-conditioned; a blurred membership answer can at worst
/// admit a redundant basis element, never flip a verdict, because verdicts
/// read operator traces and not span bookkeeping.
struct NaiveStore {
    capacity: usize,
    tolerance: f64,
    elements: Vec<ComplexMatrix>,
    /// gram[i][j] = ⟨elements[i], elements[j]⟩, Hermitian.
    gram: Vec<Vec<Complex>>,
}

impl NaiveStore {
    fn new(capacity: usize, tolerance: f64) -> Self {
        NaiveStore {
            capacity,
            tolerance,
            elements: Vec::new(),
            gram: Vec::new(),
        }
    }

    fn contains(&self, op: &ComplexMatrix) -> bool {
        let norm_sq = op.frobenius_norm_sq();
        if norm_sq == 0.0 {
            return true;
        }
        if self.elements.is_empty() {
            return false;
        }
        let overlaps: Vec<Complex> = self
            .elements
            .iter()
            .map(|e| e.frobenius_inner(op))
            .collect();
        let coefs = solve_dense(self.gram.clone(), overlaps.clone());
        // Squared residual of op against span: ⟨op,op⟩ − h†G⁻¹h. Clamped
        // because severe ill-conditioning can push the solve past zero.
        let projected: f64 = overlaps
            .iter()
            .zip(&coefs)
            .map(|(h, c)| (h.conj() * c).re)
            .sum();
        (norm_sq - projected).max(0.0) <= self.tolerance * norm_sq
    }
}

impl SpanStore for NaiveStore {
    fn insert(&mut self, op: &ComplexMatrix) -> bool {
        if self.elements.len() >= self.capacity || self.contains(op) {
            return false;
        }
        let inv_norm = Complex::new(1.0 / op.frobenius_norm(), 0.0);
        let unit = op.scale(inv_norm);
        let cross: Vec<Complex> = self
            .elements
            .iter()
            .map(|e| unit.frobenius_inner(e))
            .collect();
        for (row, c) in self.gram.iter_mut().zip(&cross) {
            row.push(c.conj());
        }
        let mut last = cross;
        last.push(Complex::new(unit.frobenius_norm_sq(), 0.0));
        self.gram.push(last);
        self.elements.push(unit);
        true
    }

    fn len(&self) -> usize {
        self.elements.len()
    }
}

#[derive(Clone, Copy, Debug)]
enum Move {
    Input(usize),
    Measure(usize),
}

enum WorkItem {
    Root,
    Child { parent: usize, mv: Move },
}

/// An operator the search accepted into a basis, with enough ancestry to
/// rebuild the experiment that produced it.
struct AcceptedNode {
    parent: Option<usize>,
    mv: Option<Move>,
    op: ComplexMatrix,
    trace: f64,
    measurements: usize,
}

/// Breadth-first search over reachable operators, keeping per-layer bases.
///
/// Every popped candidate is the seed pushed through a sequence of moves.
/// A candidate with l measurement moves is offered to `stores[l]` (always
/// `stores[0]` in the unbounded case); if independent it is also copied
/// into every higher layer whose span misses it, which keeps the layer
/// spans nested: span stores[0] ⊆ span stores[1] ⊆ … Children extend the
/// word or, when the measurement budget allows, the schedule (inputs
/// first, then outcomes, preserving breadth-first order by experiment
/// size).
///
/// `measurement_cap` of None means unbounded: a single store and no budget
/// on measurement moves. Termination is unconditional: a node is accepted
/// only when its layer store grows, and store capacities are finite.
fn run_span_bfs<S: SpanStore>(
    machine: &QuantumMealyMachine,
    seed: &ComplexMatrix,
    measurement_cap: Option<usize>,
    stores: &mut [S],
) -> Vec<AcceptedNode> {
    debug_assert_eq!(stores.len(), measurement_cap.map_or(1, |k| k + 1));
    let input_count = machine.input_alphabet().len();
    let output_count = machine.output_alphabet().len();
    let unitaries: Vec<&ComplexMatrix> = (0..input_count).map(|s| machine.unitary(s)).collect();
    let measure_ops: Vec<&ComplexMatrix> =
        (0..output_count).map(|m| machine.measurement(m)).collect();
    let unitary_adjoints: Vec<ComplexMatrix> = unitaries.iter().map(|u| u.adjoint()).collect();
    let measure_adjoints: Vec<ComplexMatrix> = measure_ops.iter().map(|m| m.adjoint()).collect();

    let mut nodes: Vec<AcceptedNode> = Vec::new();
    let mut queue: VecDeque<WorkItem> = VecDeque::new();
    queue.push_back(WorkItem::Root);

    while let Some(item) = queue.pop_front() {
        let (parent, mv, op, measurements) = match item {
            WorkItem::Root => (None, None, seed.clone(), 0),
            WorkItem::Child { parent, mv } => {
                let base = &nodes[parent].op;
                let (op, grew) = match mv {
                    Move::Input(s) => {
                        (unitaries[s].matmul(base).matmul(&unitary_adjoints[s]), 0)
                    }
                    Move::Measure(m) => {
                        (measure_ops[m].matmul(base).matmul(&measure_adjoints[m]), 1)
                    }
                };
                (Some(parent), Some(mv), op, nodes[parent].measurements + grew)
            }
        };

        let layer = if measurement_cap.is_some() { measurements } else { 0 };
        if !stores[layer].insert(&op) {
            continue;
        }
        // Nested spans make non-membership downward closed in the layer
        // index, so the layers missing this operator form the contiguous
        // run starting at `layer`; the first saturated insert ends it.
        for upper in stores.iter_mut().skip(layer + 1) {
            if !upper.insert(&op) {
                break;
            }
        }

        let id = nodes.len();
        nodes.push(AcceptedNode {
            parent,
            mv,
            op,
            trace: 0.0,
            measurements,
        });
        nodes[id].trace = nodes[id].op.trace().re;

        for s in 0..input_count {
            queue.push_back(WorkItem::Child {
                parent: id,
                mv: Move::Input(s),
            });
        }
        if measurement_cap.map_or(true, |k| measurements < k) {
            for m in 0..output_count {
                queue.push_back(WorkItem::Child {
                    parent: id,
                    mv: Move::Measure(m),
                });
            }
        }
    }
    nodes
}

/// Unwinds the move chain of an accepted node into a closed experiment.
fn experiment_of(nodes: &[AcceptedNode], id: usize) -> Experiment {
    let mut moves = Vec::new();
    let mut cursor = Some(id);
    while let Some(i) = cursor {
        if let Some(mv) = nodes[i].mv {
            moves.push(mv);
        }
        cursor = nodes[i].parent;
    }
    moves.reverse();
    let mut word = Vec::new();
    let mut points = Vec::new();
    let mut outcomes = Vec::new();
    for mv in moves {
        match mv {
            Move::Input(s) => word.push(s),
            Move::Measure(m) => {
                points.push(word.len());
                outcomes.push(m);
            }
        }
    }
    // Unitaries after the last measurement cannot change the trace, so the
    // word is cut there; the scheduler then ends at the word's end, which
    // is what makes the experiment well-formed.
    if let Some(&last) = points.last() {
        word.truncate(last);
    }
    Experiment::unchecked(word, points, outcomes)
}

/// Scans accepted operators in breadth-first order for the first trace
/// above the tolerance and replays its experiment via `probabilities`.
fn build_verdict(
    nodes: &[AcceptedNode],
    basis_sizes: Vec<usize>,
    bound: usize,
    real_mode: bool,
    trace_tolerance: f64,
    probabilities: impl Fn(&Experiment) -> Result<(f64, f64), EquivalenceError>,
) -> Result<Verdict, EquivalenceError> {
    for (id, node) in nodes.iter().enumerate() {
        if node.trace.abs() > trace_tolerance {
            let experiment = experiment_of(nodes, id);
            let (prob_s, prob_t) = probabilities(&experiment)?;
            return Ok(Verdict {
                equivalent: false,
                witness: Some(Witness {
                    experiment,
                    prob_s,
                    prob_t,
                }),
                basis_sizes,
                bound,
                real_mode,
            });
        }
    }
    Ok(Verdict {
        equivalent: true,
        witness: None,
        basis_sizes,
        bound,
        real_mode,
    })
}

fn require_state_dimension(
    machine: &QuantumMealyMachine,
    state: &DensityOperator,
) -> Result<(), EquivalenceError> {
    if state.dimension() != machine.dimension() {
        return Err(EquivalenceError::DimensionMismatch {
            state: state.dimension(),
            machine: machine.dimension(),
        });
    }
    Ok(())
}

fn check_states_impl<S: SpanStore>(
    machine: &QuantumMealyMachine,
    rho_s: &DensityOperator,
    rho_t: &DensityOperator,
    measurement_cap: Option<usize>,
    options: &CheckOptions,
    make_store: impl Fn(usize) -> S,
) -> Result<Verdict, EquivalenceError> {
    require_state_dimension(machine, rho_s)?;
    require_state_dimension(machine, rho_t)?;
    let real_mode = machine.is_real() && !options.force_complex;
    let bound = experiment_bound(machine.dimension(), real_mode);
    let mut seed = rho_s.matrix().sub(rho_t.matrix());
    if real_mode {
        // For real operators W, tr(W·Im(ρ)·Wᵀ) vanishes (the conjugated
        // matrix stays antisymmetric), so only the real part of the seed
        // can ever contribute a probability gap.
        seed = seed.real_part();
    }
    let layers = measurement_cap.map_or(1, |k| k + 1);
    let mut stores: Vec<S> = (0..layers).map(|_| make_store(bound + 1)).collect();
    let nodes = run_span_bfs(machine, &seed, measurement_cap, &mut stores);
    let basis_sizes = stores.iter().map(|s| s.len()).collect();
    build_verdict(
        &nodes,
        basis_sizes,
        bound,
        real_mode,
        options.trace_tolerance,
        |e| {
            Ok((
                machine.run_experiment(rho_s, e)?.probability,
                machine.run_experiment(rho_t, e)?.probability,
            ))
        },
    )
}

/// Decides whether two states of `machine` answer every experiment with
/// the same probabilities. O(m·n⁶) for m input symbols and dimension n.
pub fn check_states(
    machine: &QuantumMealyMachine,
    rho_s: &DensityOperator,
    rho_t: &DensityOperator,
) -> Result<Verdict, EquivalenceError> {
    check_states_with(machine, rho_s, rho_t, &CheckOptions::default())
}

pub fn check_states_with(
    machine: &QuantumMealyMachine,
    rho_s: &DensityOperator,
    rho_t: &DensityOperator,
    options: &CheckOptions,
) -> Result<Verdict, EquivalenceError> {
    check_states_impl(machine, rho_s, rho_t, None, options, |dim| {
        SpanTracker::with_tolerance(dim, options.span_tolerance)
    })
}

/// Decides equivalence under a budget of at most `k` measurement points.
/// Every state pair is 0-equivalent: with no measurement there is no
/// outcome to observe.
pub fn check_states_k(
    machine: &QuantumMealyMachine,
    rho_s: &DensityOperator,
    rho_t: &DensityOperator,
    k: usize,
) -> Result<Verdict, EquivalenceError> {
    check_states_k_with(machine, rho_s, rho_t, k, &CheckOptions::default())
}

pub fn check_states_k_with(
    machine: &QuantumMealyMachine,
    rho_s: &DensityOperator,
    rho_t: &DensityOperator,
    k: usize,
    options: &CheckOptions,
) -> Result<Verdict, EquivalenceError> {
    check_states_impl(machine, rho_s, rho_t, Some(k), options, |dim| {
        SpanTracker::with_tolerance(dim, options.span_tolerance)
    })
}

/// Same decision as [`check_states`] through the Gaussian-elimination
/// baseline store: every span query re-eliminates the Gram matrix, for an
/// O(m·n⁸) total. Exists to benchmark the tracker against.
pub fn check_states_naive(
    machine: &QuantumMealyMachine,
    rho_s: &DensityOperator,
    rho_t: &DensityOperator,
) -> Result<Verdict, EquivalenceError> {
    check_states_naive_with(machine, rho_s, rho_t, &CheckOptions::default())
}

pub fn check_states_naive_with(
    machine: &QuantumMealyMachine,
    rho_s: &DensityOperator,
    rho_t: &DensityOperator,
    options: &CheckOptions,
) -> Result<Verdict, EquivalenceError> {
    check_states_impl(machine, rho_s, rho_t, None, options, |dim| {
        NaiveStore::new(dim, options.span_tolerance)
    })
}

/// Decides whether `(m1, rho1)` and `(m2, rho2)` answer every experiment
/// with the same probabilities. The machines must share alphabets; their
/// dimensions may differ. Witness word and outcome indices refer to `m1`'s
/// symbol order.
pub fn check_machines(
    m1: &QuantumMealyMachine,
    rho1: &DensityOperator,
    m2: &QuantumMealyMachine,
    rho2: &DensityOperator,
) -> Result<Verdict, EquivalenceError> {
    check_machines_with(m1, rho1, m2, rho2, None, &CheckOptions::default())
}

/// Machine-level check with an optional measurement budget `k`.
///
/// Runs the state search on the direct-sum machine with the block seed
/// ρ1 ⊕ (−ρ2): any experiment operator V acts blockwise, so the trace of
/// V·(ρ1 ⊕ −ρ2)·V† is exactly the probability gap between the machines.
pub fn check_machines_with(
    m1: &QuantumMealyMachine,
    rho1: &DensityOperator,
    m2: &QuantumMealyMachine,
    rho2: &DensityOperator,
    k: Option<usize>,
    options: &CheckOptions,
) -> Result<Verdict, EquivalenceError> {
    require_state_dimension(m1, rho1)?;
    require_state_dimension(m2, rho2)?;
    let sum = m1.direct_sum(m2)?;
    let real_mode = sum.is_real() && !options.force_complex;
    let bound = experiment_bound(m1.dimension(), real_mode)
        + experiment_bound(m2.dimension(), real_mode)
        + 1;
    let minus_one = Complex::new(-1.0, 0.0);
    let mut seed = rho1.matrix().direct_sum(&rho2.matrix().scale(minus_one));
    if real_mode {
        seed = seed.real_part();
    }
    let layers = k.map_or(1, |k| k + 1);
    let mut stores: Vec<SpanTracker> = (0..layers)
        .map(|_| SpanTracker::with_tolerance(bound + 1, options.span_tolerance))
        .collect();
    let nodes = run_span_bfs(&sum, &seed, k, &mut stores);
    let basis_sizes = stores.iter().map(|s| s.len()).collect();
    let m2_aligned = m2.with_symbol_order(m1.input_alphabet(), m1.output_alphabet())?;
    build_verdict(
        &nodes,
        basis_sizes,
        bound,
        real_mode,
        options.trace_tolerance,
        |e| {
            Ok((
                m1.run_experiment(rho1, e)?.probability,
                m2_aligned.run_experiment(rho2, e)?.probability,
            ))
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::example_machines;

    fn options_forcing_complex() -> CheckOptions {
        CheckOptions {
            force_complex: true,
            ..CheckOptions::default()
        }
    }

    #[test]
    fn controlled_not_states_are_equivalent() {
        let (machine, states) = example_machines::controlled_not_machine();
        let verdict = check_states(&machine, &states["00"], &states["01"]).unwrap();
        assert!(verdict.equivalent);
        assert!(verdict.witness.is_none());
        assert!(verdict.real_mode);
        assert_eq!(verdict.bound, 9);
        assert_eq!(verdict.max_basis_size(), 10);
        assert!(verdict.basis_size() >= 1);
        assert!(verdict.basis_size() <= 10);
    }

    #[test]
    fn extended_machine_distinguishes_the_states() {
        let (machine, states) = example_machines::extended_controlled_not_machine();
        let verdict = check_states(&machine, &states["00"], &states["01"]).unwrap();
        assert!(!verdict.equivalent);
        let witness = verdict.witness.as_ref().unwrap();
        assert!(witness.experiment.is_closed());
        assert!(witness.experiment.size() <= verdict.bound);
        assert!(witness.experiment.check_against(&machine).is_ok());
        assert!(witness.gap() > 1e-6);
        // The witness fields must be honest replays of the experiment.
        let p_s = machine
            .run_experiment(&states["00"], &witness.experiment)
            .unwrap()
            .probability;
        let p_t = machine
            .run_experiment(&states["01"], &witness.experiment)
            .unwrap()
            .probability;
        assert!((p_s - witness.prob_s).abs() < 1e-12);
        assert!((p_t - witness.prob_t).abs() < 1e-12);
    }

    #[test]
    fn forcing_complex_widens_the_bound_without_changing_verdicts() {
        let options = options_forcing_complex();
        let (machine, states) = example_machines::controlled_not_machine();
        let verdict =
            check_states_with(&machine, &states["00"], &states["01"], &options).unwrap();
        assert!(verdict.equivalent);
        assert!(!verdict.real_mode);
        assert_eq!(verdict.bound, 15);
        assert_eq!(verdict.max_basis_size(), 16);

        let (machine, states) = example_machines::extended_controlled_not_machine();
        let verdict =
            check_states_with(&machine, &states["00"], &states["01"], &options).unwrap();
        assert!(!verdict.equivalent);
        assert_eq!(verdict.bound, 15);
    }

    #[test]
    fn bell_states_split_exactly_at_two_measurements() {
        let (machine, states) = example_machines::swap_hadamard_machine();
        let s = &states["bell00"];
        let t = &states["bell10"];

        let zero = check_states_k(&machine, s, t, 0).unwrap();
        assert!(zero.equivalent);
        assert_eq!(zero.basis_sizes.len(), 1);

        let one = check_states_k(&machine, s, t, 1).unwrap();
        assert!(one.equivalent);
        assert_eq!(one.basis_sizes.len(), 2);

        let two = check_states_k(&machine, s, t, 2).unwrap();
        assert!(!two.equivalent);
        assert_eq!(two.basis_sizes.len(), 3);
        // Layer spans are nested and each basis size equals its span's
        // dimension, so the sizes cannot decrease.
        for pair in two.basis_sizes.windows(2) {
            assert!(pair[0] <= pair[1]);
        }
        let witness = two.witness.as_ref().unwrap();
        assert!(witness.experiment.outcomes().len() <= 2);
        assert!(witness.experiment.is_closed());
        assert!(witness.gap() > 1e-6);

        let unbounded = check_states(&machine, s, t).unwrap();
        assert!(!unbounded.equivalent);
    }

    #[test]
    fn naive_store_agrees_with_tracker_on_examples() {
        let (machine, states) = example_machines::controlled_not_machine();
        let fast = check_states(&machine, &states["00"], &states["01"]).unwrap();
        let slow = check_states_naive(&machine, &states["00"], &states["01"]).unwrap();
        assert_eq!(fast.equivalent, slow.equivalent);
        assert_eq!(fast.basis_sizes, slow.basis_sizes);

        let (machine, states) = example_machines::extended_controlled_not_machine();
        let fast = check_states(&machine, &states["00"], &states["01"]).unwrap();
        let slow = check_states_naive(&machine, &states["00"], &states["01"]).unwrap();
        assert!(!fast.equivalent && !slow.equivalent);
        let fw = fast.witness.unwrap();
        let sw = slow.witness.unwrap();
        assert_eq!(fw.experiment.word(), sw.experiment.word());
        assert_eq!(fw.experiment.outcomes(), sw.experiment.outcomes());

        let (machine, states) = example_machines::swap_hadamard_machine();
        let fast = check_states(&machine, &states["bell00"], &states["bell10"]).unwrap();
        let slow = check_states_naive(&machine, &states["bell00"], &states["bell10"]).unwrap();
        assert_eq!(fast.equivalent, slow.equivalent);
    }

    #[test]
    fn state_is_equivalent_to_itself_with_empty_basis() {
        let (machine, states) = example_machines::extended_controlled_not_machine();
        let verdict = check_states(&machine, &states["00"], &states["00"]).unwrap();
        assert!(verdict.equivalent);
        assert_eq!(verdict.basis_sizes, vec![0]);
    }

    #[test]
    fn verdict_is_symmetric_in_the_states() {
        let (machine, states) = example_machines::extended_controlled_not_machine();
        let st = check_states(&machine, &states["00"], &states["01"]).unwrap();
        let ts = check_states(&machine, &states["01"], &states["00"]).unwrap();
        assert_eq!(st.equivalent, ts.equivalent);
        let (wst, wts) = (st.witness.unwrap(), ts.witness.unwrap());
        assert!((wst.gap() - wts.gap()).abs() < 1e-12);
    }

    #[test]
    fn rejects_state_of_wrong_dimension() {
        let (machine, _) = example_machines::controlled_not_machine();
        let small = DensityOperator::basis_state(2, 0);
        assert!(matches!(
            check_states(&machine, &small, &small),
            Err(EquivalenceError::DimensionMismatch { state: 2, machine: 4 })
        ));
    }

    #[test]
    fn machine_is_equivalent_to_itself_and_to_a_rotated_copy() {
        let (machine, states) = example_machines::extended_controlled_not_machine();
        let rho = &states["00"];
        let same = check_machines(&machine, rho, &machine, rho).unwrap();
        assert!(same.equivalent);
        assert!(same.real_mode);
        assert_eq!(same.bound, 19);

        let w = ComplexMatrix::plane_rotation(4, 0, 3, 0.9)
            .matmul(&ComplexMatrix::plane_rotation(4, 1, 2, -0.4));
        let rotated = machine.change_basis(&w).unwrap();
        let rho_w = DensityOperator::new(rho.matrix().conjugate_by(&w)).unwrap();
        let verdict = check_machines(&machine, rho, &rotated, &rho_w).unwrap();
        assert!(verdict.equivalent);
    }

    #[test]
    fn machine_check_detects_a_perturbed_unitary() {
        let (machine, states) = example_machines::extended_controlled_not_machine();
        let rho = &states["00"];
        let tweak = ComplexMatrix::plane_rotation(4, 0, 2, 0.3);
        let unitaries = (0..machine.input_alphabet().len())
            .map(|s| {
                if s == 1 {
                    tweak.matmul(machine.unitary(s))
                } else {
                    machine.unitary(s).clone()
                }
            })
            .collect();
        let measurements = (0..machine.output_alphabet().len())
            .map(|m| machine.measurement(m).clone())
            .collect();
        let perturbed = QuantumMealyMachine::new(
            machine.input_alphabet().to_vec(),
            machine.output_alphabet().to_vec(),
            unitaries,
            measurements,
        )
        .unwrap();

        let verdict = check_machines(&machine, rho, &perturbed, rho).unwrap();
        assert!(!verdict.equivalent);
        let witness = verdict.witness.as_ref().unwrap();
        assert!(witness.gap() > 1e-6);
        assert!(witness.experiment.size() <= verdict.bound);
        let replayed = machine.run_experiment(rho, &witness.experiment).unwrap();
        assert!((replayed.probability - witness.prob_s).abs() < 1e-12);
    }

    #[test]
    fn machine_check_matches_state_check_on_a_shared_machine() {
        let (machine, states) = example_machines::extended_controlled_not_machine();
        let pair = check_machines(&machine, &states["00"], &machine, &states["01"]).unwrap();
        let single = check_states(&machine, &states["00"], &states["01"]).unwrap();
        assert_eq!(pair.equivalent, single.equivalent);
        let (pw, sw) = (pair.witness.unwrap(), single.witness.unwrap());
        assert!((pw.gap() - sw.gap()).abs() < 1e-9);
    }

    #[test]
    fn machine_check_respects_the_measurement_budget() {
        let (machine, states) = example_machines::swap_hadamard_machine();
        let s = &states["bell00"];
        let t = &states["bell10"];
        let one =
            check_machines_with(&machine, s, &machine, t, Some(1), &CheckOptions::default())
                .unwrap();
        assert!(one.equivalent);
        let two =
            check_machines_with(&machine, s, &machine, t, Some(2), &CheckOptions::default())
                .unwrap();
        assert!(!two.equivalent);
        assert!(two.witness.unwrap().experiment.outcomes().len() <= 2);
    }

    #[test]
    fn naive_solver_handles_dependent_rows() {
        // Singular system: second row is twice the first. The skipped
        // pivot leaves x[1] at zero and back-substitution still satisfies
        // the first equation.
        let one = Complex::new(1.0, 0.0);
        let a = vec![vec![one, one], vec![one + one, one + one]];
        let b = vec![one + one, one + one + one + one];
        let x = solve_dense(a, b);
        assert!((x[0] + x[1] - (one + one)).norm() < 1e-12);
    }
}
