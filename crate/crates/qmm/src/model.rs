//! Machines, states, schedulers, and experiments.
//!
//! A machine is a finite input alphabet Σ with one unitary per symbol, a
//! finite output alphabet Γ with one measurement operator per symbol
//! (jointly complete: Σ_γ M_γ†M_γ = I), and a Hilbert space dimension. An
//! experiment feeds the machine a word, interrupts it at scheduled points
//! to measure, and records the outcomes; its probability and post state
//! follow from the induced operator.

use crate::linalg::{Complex, ComplexMatrix};
use thiserror::Error;

/// Max-entry tolerance for unitarity, measurement completeness, and
/// density-operator validation.
pub const OPERATOR_TOLERANCE: f64 = 1e-9;

/// Pivot tolerance for the positive-semidefiniteness factorization; small
/// negative pivots of rounding size are accepted.
pub const PSD_PIVOT_TOLERANCE: f64 = 1e-9;

/// A machine counts as real when every operator entry has imaginary part
/// of at most this magnitude.
pub const REALNESS_TOLERANCE: f64 = 1e-12;

/// Post-experiment states are normalized only when the outcome probability
/// exceeds this cutoff; below it the conditional state is meaningless.
pub const NORMALIZATION_CUTOFF: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("input alphabet is empty")]
    EmptyInputAlphabet,
    #[error("output alphabet is empty")]
    EmptyOutputAlphabet,
    #[error("duplicate symbol {0:?}")]
    DuplicateSymbol(String),
    #[error("expected {expected} operators for {kind} alphabet, got {got}")]
    OperatorCountMismatch {
        kind: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("operator for symbol {symbol:?} is {rows}x{cols}, expected {dim}x{dim}")]
    OperatorShape {
        symbol: String,
        rows: usize,
        cols: usize,
        dim: usize,
    },
    #[error("operator for input symbol {symbol:?} is not unitary (max |U†U - I| = {residual:.3e})")]
    NotUnitary { symbol: String, residual: f64 },
    #[error("measurement operators are not complete (max |ΣM†M - I| = {residual:.3e})")]
    IncompleteMeasurement { residual: f64 },
    #[error("density operator is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("density operator is not Hermitian (max |ρ - ρ†| = {residual:.3e})")]
    NotHermitian { residual: f64 },
    #[error("density operator has trace {trace}, expected 1")]
    TraceNotOne { trace: f64 },
    #[error("density operator is not positive semidefinite (pivot {pivot:.3e})")]
    NotPositiveSemidefinite { pivot: f64 },
    #[error("state amplitude vector has zero norm")]
    ZeroState,
    #[error("scheduler points must be nondecreasing ({earlier} precedes {later})")]
    SchedulerNotSorted { earlier: usize, later: usize },
    #[error("scheduler point {point} exceeds word length {word_len}")]
    SchedulerBeyondWord { point: usize, word_len: usize },
    #[error("experiment has {outcomes} outcomes but {points} scheduled measurements")]
    OutcomeCountMismatch { outcomes: usize, points: usize },
    #[error("symbol index {index} out of range ({len} symbols)")]
    SymbolOutOfRange { index: usize, len: usize },
    #[error("state dimension {state} does not match machine dimension {machine}")]
    DimensionMismatch { state: usize, machine: usize },
    #[error("machines have different {kind} alphabets")]
    AlphabetMismatch { kind: &'static str },
}

/// Finite-state quantum machine: one unitary per input symbol, one
/// measurement operator per output symbol.
///
/// Construction validates unitarity of every input operator and joint
/// completeness of the measurement (both to [`OPERATOR_TOLERANCE`] in the
/// max-entry norm), and that alphabets are nonempty and duplicate-free.
#[derive(Clone, Debug)]
pub struct QuantumMealyMachine {
    input_alphabet: Vec<String>,
    output_alphabet: Vec<String>,
    dimension: usize,
    unitaries: Vec<ComplexMatrix>,
    measurements: Vec<ComplexMatrix>,
}

impl QuantumMealyMachine {
    pub fn new(
        input_alphabet: Vec<String>,
        output_alphabet: Vec<String>,
        unitaries: Vec<ComplexMatrix>,
        measurements: Vec<ComplexMatrix>,
    ) -> Result<Self, ModelError> {
        if input_alphabet.is_empty() {
            return Err(ModelError::EmptyInputAlphabet);
        }
        if output_alphabet.is_empty() {
            return Err(ModelError::EmptyOutputAlphabet);
        }
        for (i, s) in input_alphabet.iter().enumerate() {
            if input_alphabet[..i].contains(s) {
                return Err(ModelError::DuplicateSymbol(s.clone()));
            }
        }
        for (i, s) in output_alphabet.iter().enumerate() {
            if output_alphabet[..i].contains(s) {
                return Err(ModelError::DuplicateSymbol(s.clone()));
            }
        }
        if unitaries.len() != input_alphabet.len() {
            return Err(ModelError::OperatorCountMismatch {
                kind: "input",
                expected: input_alphabet.len(),
                got: unitaries.len(),
            });
        }
        if measurements.len() != output_alphabet.len() {
            return Err(ModelError::OperatorCountMismatch {
                kind: "output",
                expected: output_alphabet.len(),
                got: measurements.len(),
            });
        }
        let dimension = unitaries[0].rows();
        let identity = ComplexMatrix::identity(dimension);
        for (symbol, u) in input_alphabet.iter().zip(&unitaries) {
            if !u.is_square() || u.rows() != dimension {
                return Err(ModelError::OperatorShape {
                    symbol: symbol.clone(),
                    rows: u.rows(),
                    cols: u.cols(),
                    dim: dimension,
                });
            }
            let residual = u.adjoint().matmul(u).max_abs_diff(&identity);
            if residual > OPERATOR_TOLERANCE {
                return Err(ModelError::NotUnitary {
                    symbol: symbol.clone(),
                    residual,
                });
            }
        }
        let mut completeness = ComplexMatrix::zeros(dimension, dimension);
        for (symbol, m) in output_alphabet.iter().zip(&measurements) {
            if !m.is_square() || m.rows() != dimension {
                return Err(ModelError::OperatorShape {
                    symbol: symbol.clone(),
                    rows: m.rows(),
                    cols: m.cols(),
                    dim: dimension,
                });
            }
            completeness = completeness.add(&m.adjoint().matmul(m));
        }
        let residual = completeness.max_abs_diff(&identity);
        if residual > OPERATOR_TOLERANCE {
            return Err(ModelError::IncompleteMeasurement { residual });
        }
        Ok(QuantumMealyMachine {
            input_alphabet,
            output_alphabet,
            dimension,
            unitaries,
            measurements,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn input_alphabet(&self) -> &[String] {
        &self.input_alphabet
    }

    pub fn output_alphabet(&self) -> &[String] {
        &self.output_alphabet
    }

    pub fn input_index(&self, symbol: &str) -> Option<usize> {
        self.input_alphabet.iter().position(|s| s == symbol)
    }

    pub fn output_index(&self, symbol: &str) -> Option<usize> {
        self.output_alphabet.iter().position(|s| s == symbol)
    }

    pub fn unitary(&self, index: usize) -> &ComplexMatrix {
        &self.unitaries[index]
    }

    pub fn measurement(&self, index: usize) -> &ComplexMatrix {
        &self.measurements[index]
    }

    /// Unitarity residual max |U†U - I| for one input symbol, as reported
    /// by diagnostics.
    pub fn unitarity_residual(&self, index: usize) -> f64 {
        let u = &self.unitaries[index];
        u.adjoint()
            .matmul(u)
            .max_abs_diff(&ComplexMatrix::identity(self.dimension))
    }

    /// Completeness residual max |Σ M†M - I| of the measurement family.
    pub fn completeness_residual(&self) -> f64 {
        let mut sum = ComplexMatrix::zeros(self.dimension, self.dimension);
        for m in &self.measurements {
            sum = sum.add(&m.adjoint().matmul(m));
        }
        sum.max_abs_diff(&ComplexMatrix::identity(self.dimension))
    }

    /// Whether every operator entry is real to within
    /// [`REALNESS_TOLERANCE`]. States may still be complex; realness of
    /// the machine alone already halves the span dimension bound.
    pub fn is_real(&self) -> bool {
        self.unitaries
            .iter()
            .chain(&self.measurements)
            .all(|m| m.entries().iter().all(|z| z.im.abs() <= REALNESS_TOLERANCE))
    }

    /// The composite unitary of a word, applied first-symbol-first:
    /// U_a = U_{a[k]} ··· U_{a[1]}, with the empty word giving I.
    pub fn word_unitary(&self, word: &[usize]) -> Result<ComplexMatrix, ModelError> {
        let mut acc = ComplexMatrix::identity(self.dimension);
        for &symbol in word {
            let u = self
                .unitaries
                .get(symbol)
                .ok_or(ModelError::SymbolOutOfRange {
                    index: symbol,
                    len: self.unitaries.len(),
                })?;
            acc = u.matmul(&acc);
        }
        Ok(acc)
    }

    /// The operator induced by an experiment: unitary segments between
    /// scheduled points, interleaved with the measurement operators of the
    /// recorded outcomes, then the trailing unitary segment.
    pub fn experiment_operator(&self, experiment: &Experiment) -> Result<ComplexMatrix, ModelError> {
        experiment.check_against(self)?;
        let word = experiment.word();
        let points = experiment.scheduler().points();
        let outcomes = experiment.outcomes();
        let mut acc = ComplexMatrix::identity(self.dimension);
        let mut segment_start = 0usize;
        for (&point, &outcome) in points.iter().zip(outcomes) {
            for &symbol in &word[segment_start..point] {
                acc = self.unitaries[symbol].matmul(&acc);
            }
            acc = self.measurements[outcome].matmul(&acc);
            segment_start = point;
        }
        for &symbol in &word[segment_start..] {
            acc = self.unitaries[symbol].matmul(&acc);
        }
        Ok(acc)
    }

    /// Runs an experiment on a state: probability tr(VρV†) and the
    /// unnormalized post state VρV†.
    pub fn run_experiment(
        &self,
        rho: &DensityOperator,
        experiment: &Experiment,
    ) -> Result<ExperimentOutcome, ModelError> {
        if rho.dimension() != self.dimension {
            return Err(ModelError::DimensionMismatch {
                state: rho.dimension(),
                machine: self.dimension,
            });
        }
        let v = self.experiment_operator(experiment)?;
        let post_state = rho.matrix().conjugate_by(&v);
        let raw = post_state.trace().re;
        // Rounding can push the trace marginally outside [0, 1]; clamp
        // only here, at the reporting boundary.
        let probability = raw.clamp(0.0, 1.0);
        let normalized_state = if raw > NORMALIZATION_CUTOFF {
            Some(post_state.scale(Complex::new(1.0 / raw, 0.0)))
        } else {
            None
        };
        Ok(ExperimentOutcome {
            probability,
            post_state,
            normalized_state,
        })
    }

    /// Block-diagonal combination of two machines over the same alphabets.
    ///
    /// `other`'s operators are reordered to this machine's symbol order
    /// first; the alphabets must contain the same symbols.
    pub fn direct_sum(&self, other: &QuantumMealyMachine) -> Result<QuantumMealyMachine, ModelError> {
        let other = other.with_symbol_order(&self.input_alphabet, &self.output_alphabet)?;
        let unitaries = self
            .unitaries
            .iter()
            .zip(&other.unitaries)
            .map(|(a, b)| a.direct_sum(b))
            .collect();
        let measurements = self
            .measurements
            .iter()
            .zip(&other.measurements)
            .map(|(a, b)| a.direct_sum(b))
            .collect();
        QuantumMealyMachine::new(
            self.input_alphabet.clone(),
            self.output_alphabet.clone(),
            unitaries,
            measurements,
        )
    }

    /// Conjugates every operator by `w`: U becomes WUW†, M becomes WMW†.
    ///
    /// For unitary `w` the resulting machine assigns the same probability
    /// to every experiment when states are conjugated the same way.
    pub fn change_basis(&self, w: &ComplexMatrix) -> Result<QuantumMealyMachine, ModelError> {
        if w.rows() != self.dimension || w.cols() != self.dimension {
            return Err(ModelError::DimensionMismatch {
                state: w.rows(),
                machine: self.dimension,
            });
        }
        let unitaries = self.unitaries.iter().map(|u| u.conjugate_by(w)).collect();
        let measurements = self.measurements.iter().map(|m| m.conjugate_by(w)).collect();
        QuantumMealyMachine::new(
            self.input_alphabet.clone(),
            self.output_alphabet.clone(),
            unitaries,
            measurements,
        )
    }

    /// A copy of this machine with alphabets reordered to the given symbol
    /// sequences; errors when the symbol sets differ.
    pub fn with_symbol_order(
        &self,
        input_order: &[String],
        output_order: &[String],
    ) -> Result<QuantumMealyMachine, ModelError> {
        if input_order.len() != self.input_alphabet.len() {
            return Err(ModelError::AlphabetMismatch { kind: "input" });
        }
        if output_order.len() != self.output_alphabet.len() {
            return Err(ModelError::AlphabetMismatch { kind: "output" });
        }
        let mut unitaries = Vec::with_capacity(self.unitaries.len());
        for symbol in input_order {
            let idx = self
                .input_index(symbol)
                .ok_or(ModelError::AlphabetMismatch { kind: "input" })?;
            unitaries.push(self.unitaries[idx].clone());
        }
        let mut measurements = Vec::with_capacity(self.measurements.len());
        for symbol in output_order {
            let idx = self
                .output_index(symbol)
                .ok_or(ModelError::AlphabetMismatch { kind: "output" })?;
            measurements.push(self.measurements[idx].clone());
        }
        Ok(QuantumMealyMachine {
            input_alphabet: input_order.to_vec(),
            output_alphabet: output_order.to_vec(),
            dimension: self.dimension,
            unitaries,
            measurements,
        })
    }
}

/// Result of running an experiment on a state.
#[derive(Clone, Debug)]
pub struct ExperimentOutcome {
    /// tr(VρV†), clamped to [0, 1].
    pub probability: f64,
    /// The unnormalized post state VρV†.
    pub post_state: ComplexMatrix,
    /// The post state divided by its trace; absent when the probability
    /// is at most [`NORMALIZATION_CUTOFF`].
    pub normalized_state: Option<ComplexMatrix>,
}

/// Validated density operator: Hermitian, unit trace, positive
/// semidefinite (all to the module tolerances).
#[derive(Clone, Debug)]
pub struct DensityOperator {
    matrix: ComplexMatrix,
}

impl DensityOperator {
    pub fn new(matrix: ComplexMatrix) -> Result<Self, ModelError> {
        if !matrix.is_square() {
            return Err(ModelError::NotSquare {
                rows: matrix.rows(),
                cols: matrix.cols(),
            });
        }
        let hermitian_residual = matrix.hermitian_error();
        if hermitian_residual > OPERATOR_TOLERANCE {
            return Err(ModelError::NotHermitian {
                residual: hermitian_residual,
            });
        }
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > OPERATOR_TOLERANCE || trace.im.abs() > OPERATOR_TOLERANCE {
            return Err(ModelError::TraceNotOne { trace: trace.re });
        }
        check_positive_semidefinite(&matrix)?;
        Ok(DensityOperator { matrix })
    }

    /// Pure state |ψ⟩⟨ψ| from an amplitude vector, normalized first.
    pub fn pure(amplitudes: &[Complex]) -> Result<Self, ModelError> {
        let norm_sq: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if norm_sq == 0.0 {
            return Err(ModelError::ZeroState);
        }
        let norm = norm_sq.sqrt();
        let n = amplitudes.len();
        let matrix = ComplexMatrix::from_fn(n, n, |i, j| {
            (amplitudes[i] / norm) * (amplitudes[j] / norm).conj()
        });
        DensityOperator::new(matrix)
    }

    /// |k⟩⟨k| in an n-dimensional space.
    pub fn basis_state(dimension: usize, k: usize) -> Self {
        assert!(k < dimension, "basis index out of range");
        let mut matrix = ComplexMatrix::zeros(dimension, dimension);
        matrix.set(k, k, Complex::new(1.0, 0.0));
        DensityOperator { matrix }
    }

    pub fn maximally_mixed(dimension: usize) -> Self {
        let p = Complex::new(1.0 / dimension as f64, 0.0);
        DensityOperator {
            matrix: ComplexMatrix::identity(dimension).scale(p),
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dimension(&self) -> usize {
        self.matrix.rows()
    }
}

/// Positive semidefiniteness via a pivoted outer-product factorization
/// attempt: greedily pick the largest remaining diagonal entry; a pivot
/// below -[`PSD_PIVOT_TOLERANCE`] disproves positivity, and once every
/// remaining diagonal entry is within tolerance of zero the matrix has
/// been exhausted.
fn check_positive_semidefinite(matrix: &ComplexMatrix) -> Result<(), ModelError> {
    let n = matrix.rows();
    let mut a = matrix.clone();
    let mut order: Vec<usize> = (0..n).collect();
    for step in 0..n {
        let pivot_pos = (step..n)
            .max_by(|&p, &q| {
                a.get(order[p], order[p])
                    .re
                    .total_cmp(&a.get(order[q], order[q]).re)
            })
            .unwrap();
        order.swap(step, pivot_pos);
        let pivot = a.get(order[step], order[step]).re;
        if pivot < -PSD_PIVOT_TOLERANCE {
            return Err(ModelError::NotPositiveSemidefinite { pivot });
        }
        if pivot <= PSD_PIVOT_TOLERANCE {
            // Largest remaining diagonal is ~0; the rest can only be
            // smaller. Reject any that are meaningfully negative.
            for &idx in &order[step..] {
                let d = a.get(idx, idx).re;
                if d < -PSD_PIVOT_TOLERANCE {
                    return Err(ModelError::NotPositiveSemidefinite { pivot: d });
                }
            }
            return Ok(());
        }
        // Schur complement update of the trailing block.
        for i in (step + 1)..n {
            for j in (step + 1)..n {
                let (ri, rj, rs) = (order[i], order[j], order[step]);
                let update = a.get(ri, rs) * a.get(rj, rs).conj() / pivot;
                a.set(ri, rj, a.get(ri, rj) - update);
            }
        }
    }
    Ok(())
}

/// Nondecreasing measurement positions within a word. Points may repeat
/// (measure twice in a row) and may be 0 (measure before any input).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scheduler {
    points: Vec<usize>,
}

impl Scheduler {
    pub fn new(points: Vec<usize>) -> Result<Self, ModelError> {
        for w in points.windows(2) {
            if w[0] > w[1] {
                return Err(ModelError::SchedulerNotSorted {
                    earlier: w[0],
                    later: w[1],
                });
            }
        }
        Ok(Scheduler { points })
    }

    pub fn empty() -> Self {
        Scheduler { points: Vec::new() }
    }

    pub fn points(&self) -> &[usize] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Closed means the last scheduled point is exactly the word length;
    /// an empty scheduler is not closed.
    pub fn is_closed(&self, word_len: usize) -> bool {
        self.points.last() == Some(&word_len)
    }
}

/// A word, a measurement schedule over it, and one recorded outcome per
/// scheduled measurement. Symbols are indices into a machine's alphabets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Experiment {
    word: Vec<usize>,
    scheduler: Scheduler,
    outcomes: Vec<usize>,
}

impl Experiment {
    pub fn new(
        word: Vec<usize>,
        scheduler: Scheduler,
        outcomes: Vec<usize>,
    ) -> Result<Self, ModelError> {
        if outcomes.len() != scheduler.len() {
            return Err(ModelError::OutcomeCountMismatch {
                outcomes: outcomes.len(),
                points: scheduler.len(),
            });
        }
        if let Some(&last) = scheduler.points().last() {
            if last > word.len() {
                return Err(ModelError::SchedulerBeyondWord {
                    point: last,
                    word_len: word.len(),
                });
            }
        }
        Ok(Experiment {
            word,
            scheduler,
            outcomes,
        })
    }

    /// The empty experiment: no inputs, no measurements.
    pub fn empty() -> Self {
        Experiment {
            word: Vec::new(),
            scheduler: Scheduler::empty(),
            outcomes: Vec::new(),
        }
    }

    pub(crate) fn unchecked(word: Vec<usize>, points: Vec<usize>, outcomes: Vec<usize>) -> Self {
        Experiment {
            word,
            scheduler: Scheduler { points },
            outcomes,
        }
    }

    pub fn word(&self) -> &[usize] {
        &self.word
    }

    pub fn scheduler(&self) -> &Scheduler {
        &self.scheduler
    }

    pub fn outcomes(&self) -> &[usize] {
        &self.outcomes
    }

    /// Experiment size: word length plus number of measurements.
    pub fn size(&self) -> usize {
        self.word.len() + self.scheduler.len()
    }

    pub fn is_closed(&self) -> bool {
        self.scheduler.is_closed(self.word.len())
    }

    /// Validates symbol indices against a machine's alphabets.
    pub fn check_against(&self, machine: &QuantumMealyMachine) -> Result<(), ModelError> {
        let inputs = machine.input_alphabet().len();
        for &s in &self.word {
            if s >= inputs {
                return Err(ModelError::SymbolOutOfRange {
                    index: s,
                    len: inputs,
                });
            }
        }
        let outputs = machine.output_alphabet().len();
        for &o in &self.outcomes {
            if o >= outputs {
                return Err(ModelError::SymbolOutOfRange {
                    index: o,
                    len: outputs,
                });
            }
        }
        Ok(())
    }

    /// Renders word and outcomes through a machine's symbol names, e.g.
    /// `("H1 H2 C H1", "0")`.
    pub fn render(&self, machine: &QuantumMealyMachine) -> (String, String) {
        let word = self
            .word
            .iter()
            .map(|&s| machine.input_alphabet()[s].as_str())
            .collect::<Vec<_>>()
            .join(" ");
        let outcomes = self
            .outcomes
            .iter()
            .map(|&o| machine.output_alphabet()[o].as_str())
            .collect::<Vec<_>>()
            .join(" ");
        (word, outcomes)
    }
}
