//! Polynomial-system encodings of machine equivalence.
//!
//! Whether a machine admits an equivalent realization on a smaller state
//! space is decidable in polynomial space: the question reduces to the
//! satisfiability of a system of polynomial equations of degree at most
//! three over the reals. This module emits those systems. [`encode_problem1`]
//! covers unbounded equivalence, [`encode_problem2`] equivalence under a
//! measurement budget. The unknowns are the candidate machine (unitaries,
//! measurement operators, and a factor of the initial state), a family of
//! column-stack matrices whose columns span the reachable operators of the
//! joint system, and real coefficient matrices that express how each input
//! or measurement symbol acts on those columns.
//!
//! No solver ships here. Systems serialize to a line-oriented text format
//! (see [`PolynomialSystem::write_text`]) for external tools, and
//! [`construct_witness`] builds a concrete satisfying assignment from a
//! known equivalent pair so the encodings can be exercised end to end with
//! [`verify_assignment`].
//!
//! The bridge between operators and columns is the standard lifting: a
//! matrix M acts on vectorized operators through [`lift`], which satisfies
//! vec(M·ρ·M†) = lift(M)·vec(ρ), and traces are read off by pairing with
//! [`trace_vector`].

mod encode;
mod format;
mod witness;

use std::collections::BTreeMap;

use thiserror::Error;

use crate::linalg::{Complex, ComplexMatrix};
use crate::model::ModelError;

pub use encode::{encode_problem1, encode_problem2};
pub use witness::construct_witness;

#[derive(Debug, Error)]
pub enum MinimiseError {
    #[error("assignment is missing variable {name}")]
    MissingVariable { name: String },
    #[error("target dimension {target} must lie in 1..={limit}")]
    TargetDimension { target: usize, limit: usize },
    #[error("measurement budget must be at least 1")]
    ZeroBudget,
    #[error("state dimension {state} does not match machine dimension {machine}")]
    DimensionMismatch { state: usize, machine: usize },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Row-major vectorization: entry (i, j) of an n×m matrix lands at
/// position i·m + j.
pub fn vectorize(matrix: &ComplexMatrix) -> Vec<Complex> {
    let mut out = Vec::with_capacity(matrix.rows() * matrix.cols());
    for i in 0..matrix.rows() {
        for j in 0..matrix.cols() {
            out.push(matrix.get(i, j));
        }
    }
    out
}

/// The vector η with η†·vec(ρ) = tr(ρ): ones at the diagonal positions of
/// the row-major vectorization, zeros elsewhere.
pub fn trace_vector(n: usize) -> Vec<Complex> {
    let mut out = vec![Complex::new(0.0, 0.0); n * n];
    for i in 0..n {
        out[i * n + i] = Complex::new(1.0, 0.0);
    }
    out
}

/// The conjugation action of a matrix on vectorized operators.
///
/// For an n×n matrix M this is the n²×n² matrix with entry
/// (i·n+j, x·n+y) = M[i,x]·conj(M[j,y]), the unique matrix satisfying
/// vec(M·ρ·M†) = lift(M)·vec(ρ) for every ρ.
#[derive(Clone, Debug)]
pub struct LiftedOperator {
    matrix: ComplexMatrix,
}

impl LiftedOperator {
    /// Side length n of the matrix that was lifted.
    pub fn base_dimension(&self) -> usize {
        // Rows count is n² by construction.
        (self.matrix.rows() as f64).sqrt().round() as usize
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Applies the lift to a vectorized operator.
    ///
    /// # Panics
    /// Panics when the vector length is not n².
    pub fn apply(&self, vec: &[Complex]) -> Vec<Complex> {
        let n2 = self.matrix.rows();
        assert_eq!(vec.len(), n2, "lifted operator applied to wrong length");
        let mut out = vec![Complex::new(0.0, 0.0); n2];
        for (i, slot) in out.iter_mut().enumerate() {
            let mut acc = Complex::new(0.0, 0.0);
            for (j, v) in vec.iter().enumerate() {
                acc += self.matrix.get(i, j) * v;
            }
            *slot = acc;
        }
        out
    }
}

/// Lifts a square matrix to its conjugation action on vectorized
/// operators. See [`LiftedOperator`].
///
/// # Panics
/// Panics on a non-square input.
pub fn lift(matrix: &ComplexMatrix) -> LiftedOperator {
    assert_eq!(matrix.rows(), matrix.cols(), "lift of a non-square matrix");
    let n = matrix.rows();
    let mut lifted = ComplexMatrix::zeros(n * n, n * n);
    for i in 0..n {
        for j in 0..n {
            for x in 0..n {
                for y in 0..n {
                    let value = matrix.get(i, x) * matrix.get(j, y).conj();
                    lifted.set(i * n + j, x * n + y, value);
                }
            }
        }
    }
    LiftedOperator { matrix: lifted }
}

/// Which structural equation a constraint encodes. The first four mirror
/// the shape of the joint-system recurrence; the last three pin the
/// candidate machine itself to be well formed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Condition {
    /// The first column of the level-0 column stack is the pair of
    /// vectorized initial states.
    FirstColumn,
    /// Every column has equal traces in its two blocks, so the two
    /// machines assign every experiment the same probability.
    TraceOrthogonality,
    /// The lifted input action maps each level's columns into themselves.
    InputIntertwining,
    /// The lifted measurement action maps each level's columns into the
    /// next level's columns.
    MeasurementStepping,
    /// Candidate input matrices are unitary.
    CandidateUnitarity,
    /// Candidate measurement operators sum to the identity in M†M.
    CandidateCompleteness,
    /// The candidate initial state has unit trace.
    CandidateUnitTrace,
}

impl Condition {
    pub fn slug(&self) -> &'static str {
        match self {
            Condition::FirstColumn => "first-column",
            Condition::TraceOrthogonality => "trace-orthogonality",
            Condition::InputIntertwining => "input-intertwining",
            Condition::MeasurementStepping => "measurement-stepping",
            Condition::CandidateUnitarity => "candidate-unitarity",
            Condition::CandidateCompleteness => "candidate-completeness",
            Condition::CandidateUnitTrace => "candidate-unit-trace",
        }
    }
}

/// A product of real variables with a real coefficient. Variables are
/// indices into the owning system's variable table; the list is sorted.
#[derive(Clone, Debug)]
pub struct Monomial {
    coefficient: f64,
    variables: Vec<usize>,
}

impl Monomial {
    pub fn coefficient(&self) -> f64 {
        self.coefficient
    }

    pub fn variables(&self) -> &[usize] {
        &self.variables
    }

    pub fn degree(&self) -> usize {
        self.variables.len()
    }

    fn evaluate(&self, values: &[f64]) -> f64 {
        let mut acc = self.coefficient;
        for &v in &self.variables {
            acc *= values[v];
        }
        acc
    }
}

/// One polynomial equation `Σ monomials = 0`.
#[derive(Clone, Debug)]
pub struct Constraint {
    label: String,
    condition: Condition,
    monomials: Vec<Monomial>,
}

impl Constraint {
    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn condition(&self) -> Condition {
        self.condition
    }

    pub fn monomials(&self) -> &[Monomial] {
        &self.monomials
    }

    /// Evaluates the polynomial at a full variable valuation.
    pub fn evaluate(&self, values: &[f64]) -> f64 {
        self.monomials.iter().map(|m| m.evaluate(values)).sum()
    }
}

/// A system of real polynomial equations, all required to vanish.
///
/// Variables are named; constraints reference them by index. Systems
/// produced by the encoders in this module have degree at most three.
#[derive(Clone, Debug)]
pub struct PolynomialSystem {
    title: String,
    variables: Vec<String>,
    constraints: Vec<Constraint>,
}

impl PolynomialSystem {
    pub fn title(&self) -> &str {
        &self.title
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn variable_count(&self) -> usize {
        self.variables.len()
    }

    pub fn constraint_count(&self) -> usize {
        self.constraints.len()
    }

    pub fn monomial_count(&self) -> usize {
        self.constraints.iter().map(|c| c.monomials.len()).sum()
    }

    pub fn max_degree(&self) -> usize {
        self.constraints
            .iter()
            .flat_map(|c| c.monomials.iter())
            .map(|m| m.degree())
            .max()
            .unwrap_or(0)
    }
}

/// A named valuation of system variables.
#[derive(Clone, Debug, Default)]
pub struct Assignment {
    values: BTreeMap<String, f64>,
}

impl Assignment {
    pub fn new() -> Self {
        Assignment::default()
    }

    pub fn set(&mut self, name: impl Into<String>, value: f64) {
        self.values.insert(name.into(), value);
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.values.get(name).copied()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.values.iter().map(|(k, &v)| (k.as_str(), v))
    }

    pub(crate) fn set_complex(&mut self, base: &str, value: Complex) {
        self.set(format!("{base}_re"), value.re);
        self.set(format!("{base}_im"), value.im);
    }
}

/// The residual of one constraint under an assignment.
#[derive(Clone, Debug)]
pub struct ConstraintResidual {
    label: String,
    condition: Condition,
    residual: f64,
}

impl ConstraintResidual {
    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn condition(&self) -> Condition {
        self.condition
    }

    pub fn residual(&self) -> f64 {
        self.residual
    }
}

/// Per-constraint residuals of an assignment, in system order.
#[derive(Clone, Debug)]
pub struct VerificationReport {
    entries: Vec<ConstraintResidual>,
}

impl VerificationReport {
    /// Residuals at or below this bound count as satisfied.
    pub const TOLERANCE: f64 = 1e-8;

    pub fn entries(&self) -> &[ConstraintResidual] {
        &self.entries
    }

    pub fn max_residual(&self) -> f64 {
        self.entries.iter().map(|e| e.residual).fold(0.0, f64::max)
    }

    pub fn passes(&self) -> bool {
        self.max_residual() <= Self::TOLERANCE
    }

    /// Constraints whose residual exceeds the tolerance.
    pub fn violations(&self) -> impl Iterator<Item = &ConstraintResidual> {
        self.entries.iter().filter(|e| e.residual > Self::TOLERANCE)
    }

    /// The worst-satisfied constraint, if the system is nonempty.
    pub fn worst(&self) -> Option<&ConstraintResidual> {
        self.entries
            .iter()
            .max_by(|a, b| a.residual.total_cmp(&b.residual))
    }
}

/// Evaluates every constraint of `system` at `assignment`.
///
/// Fails when the assignment misses any declared variable. The report
/// passes when every residual is at most [`VerificationReport::TOLERANCE`].
pub fn verify_assignment(
    system: &PolynomialSystem,
    assignment: &Assignment,
) -> Result<VerificationReport, MinimiseError> {
    let mut values = Vec::with_capacity(system.variables.len());
    for name in &system.variables {
        match assignment.get(name) {
            Some(v) => values.push(v),
            None => {
                return Err(MinimiseError::MissingVariable { name: name.clone() });
            }
        }
    }
    let entries = system
        .constraints
        .iter()
        .map(|c| ConstraintResidual {
            label: c.label.clone(),
            condition: c.condition,
            residual: c.evaluate(&values).abs(),
        })
        .collect();
    Ok(VerificationReport { entries })
}

/// Shared variable naming for the encoders and the witness builder. A
/// `level` of `None` means the single-level unbounded encoding.
pub(crate) mod names {
    pub fn unitary(symbol: usize, i: usize, j: usize) -> String {
        format!("U_{symbol}_{i}_{j}")
    }

    pub fn measurement(symbol: usize, i: usize, j: usize) -> String {
        format!("M_{symbol}_{i}_{j}")
    }

    pub fn state_factor(i: usize, j: usize) -> String {
        format!("L_{i}_{j}")
    }

    pub fn column_stack(level: Option<usize>, r: usize, c: usize) -> String {
        match level {
            Some(l) => format!("F_{l}_{r}_{c}"),
            None => format!("F_{r}_{c}"),
        }
    }

    pub fn input_coef(symbol: usize, level: Option<usize>, r: usize, c: usize) -> String {
        match level {
            Some(l) => format!("Ain_{symbol}_{l}_{r}_{c}"),
            None => format!("Ain_{symbol}_{r}_{c}"),
        }
    }

    pub fn output_coef(symbol: usize, level: Option<usize>, r: usize, c: usize) -> String {
        match level {
            Some(l) => format!("Aout_{symbol}_{l}_{r}_{c}"),
            None => format!("Aout_{symbol}_{r}_{c}"),
        }
    }
}
