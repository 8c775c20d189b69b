//! Constraint emission for the equivalence encodings.
//!
//! Complex quantities are split into real and imaginary parts at emission
//! time, so every constraint is a real polynomial. Entries of the lifted
//! candidate action expand as products of two candidate variables, which
//! caps the total degree at three: lifted entry times column variable.
//! Equations whose imaginary part cancels identically (diagonal entries of
//! Hermitian conditions) are dropped rather than emitted as `0 = 0`.

use std::collections::HashMap;

use crate::linalg::{Complex, ComplexMatrix};
use crate::model::{DensityOperator, QuantumMealyMachine};

use super::names;
use super::{
    lift, trace_vector, vectorize, Condition, Constraint, MinimiseError, Monomial,
    PolynomialSystem,
};

/// Real polynomial under construction. Terms stay unsorted until pushed
/// into a constraint.
#[derive(Clone, Default)]
struct Poly {
    terms: Vec<Monomial>,
}

impl Poly {
    fn constant(value: f64) -> Poly {
        if value == 0.0 {
            return Poly::default();
        }
        Poly {
            terms: vec![Monomial {
                coefficient: value,
                variables: vec![],
            }],
        }
    }

    fn variable(index: usize) -> Poly {
        Poly {
            terms: vec![Monomial {
                coefficient: 1.0,
                variables: vec![index],
            }],
        }
    }

    fn add(mut self, other: &Poly) -> Poly {
        self.terms.extend(other.terms.iter().cloned());
        self
    }

    fn sub(mut self, other: &Poly) -> Poly {
        self.terms.extend(other.terms.iter().map(|m| Monomial {
            coefficient: -m.coefficient,
            variables: m.variables.clone(),
        }));
        self
    }

    fn mul(&self, other: &Poly) -> Poly {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                let mut variables = Vec::with_capacity(a.variables.len() + b.variables.len());
                variables.extend_from_slice(&a.variables);
                variables.extend_from_slice(&b.variables);
                terms.push(Monomial {
                    coefficient: a.coefficient * b.coefficient,
                    variables,
                });
            }
        }
        Poly { terms }
    }

    fn scale(mut self, factor: f64) -> Poly {
        if factor == 0.0 {
            return Poly::default();
        }
        for t in &mut self.terms {
            t.coefficient *= factor;
        }
        self
    }

    /// Sorts variables inside each monomial, merges like terms, and drops
    /// terms that cancel exactly.
    fn normalize(mut self) -> Vec<Monomial> {
        for t in &mut self.terms {
            t.variables.sort_unstable();
        }
        self.terms.sort_by(|a, b| a.variables.cmp(&b.variables));
        let mut out: Vec<Monomial> = Vec::with_capacity(self.terms.len());
        for t in self.terms {
            if let Some(last) = out.last_mut() {
                if last.variables == t.variables {
                    last.coefficient += t.coefficient;
                    continue;
                }
            }
            out.push(t);
        }
        out.retain(|t| t.coefficient != 0.0);
        out
    }
}

/// A complex expression as a pair of real polynomials.
#[derive(Clone, Default)]
struct CExpr {
    re: Poly,
    im: Poly,
}

impl CExpr {
    fn zero() -> CExpr {
        CExpr::default()
    }

    fn constant(z: Complex) -> CExpr {
        CExpr {
            re: Poly::constant(z.re),
            im: Poly::constant(z.im),
        }
    }

    fn add(self, other: &CExpr) -> CExpr {
        CExpr {
            re: self.re.add(&other.re),
            im: self.im.add(&other.im),
        }
    }

    fn sub(self, other: &CExpr) -> CExpr {
        CExpr {
            re: self.re.sub(&other.re),
            im: self.im.sub(&other.im),
        }
    }

    fn mul(&self, other: &CExpr) -> CExpr {
        CExpr {
            re: self.re.mul(&other.re).sub(&self.im.mul(&other.im)),
            im: self.re.mul(&other.im).add(&self.im.mul(&other.re)),
        }
    }

    fn conj(&self) -> CExpr {
        CExpr {
            re: self.re.clone(),
            im: self.im.clone().scale(-1.0),
        }
    }

    fn scale(&self, z: Complex) -> CExpr {
        CExpr {
            re: self.re.clone().scale(z.re).sub(&self.im.clone().scale(z.im)),
            im: self.re.clone().scale(z.im).add(&self.im.clone().scale(z.re)),
        }
    }

    /// Multiplication by a single real variable.
    fn mul_var(&self, var: usize) -> CExpr {
        let v = Poly::variable(var);
        CExpr {
            re: self.re.mul(&v),
            im: self.im.mul(&v),
        }
    }
}

struct SystemBuilder {
    title: String,
    variables: Vec<String>,
    index: HashMap<String, usize>,
    constraints: Vec<Constraint>,
}

impl SystemBuilder {
    fn new(title: String) -> SystemBuilder {
        SystemBuilder {
            title,
            variables: Vec::new(),
            index: HashMap::new(),
            constraints: Vec::new(),
        }
    }

    fn declare(&mut self, name: String) {
        let id = self.variables.len();
        let previous = self.index.insert(name.clone(), id);
        assert!(previous.is_none(), "duplicate variable {name}");
        self.variables.push(name);
    }

    fn declare_complex(&mut self, base: &str) {
        self.declare(format!("{base}_re"));
        self.declare(format!("{base}_im"));
    }

    fn lookup(&self, name: &str) -> usize {
        *self
            .index
            .get(name)
            .unwrap_or_else(|| panic!("undeclared variable {name}"))
    }

    fn complex_entry(&self, base: &str) -> CExpr {
        CExpr {
            re: Poly::variable(self.lookup(&format!("{base}_re"))),
            im: Poly::variable(self.lookup(&format!("{base}_im"))),
        }
    }

    fn push_real(&mut self, label: String, condition: Condition, poly: Poly) {
        let monomials = poly.normalize();
        if monomials.is_empty() {
            return;
        }
        for m in &monomials {
            assert!(m.degree() <= 3, "constraint {label} exceeds degree 3");
        }
        self.constraints.push(Constraint {
            label,
            condition,
            monomials,
        });
    }

    fn push_complex(&mut self, label: &str, condition: Condition, expr: CExpr) {
        self.push_real(format!("{label}_re"), condition, expr.re);
        self.push_real(format!("{label}_im"), condition, expr.im);
    }

    fn finish(self) -> PolynomialSystem {
        PolynomialSystem {
            title: self.title,
            variables: self.variables,
            constraints: self.constraints,
        }
    }
}

/// Encodes the existence of a `target_dim`-dimensional machine equivalent
/// to `(machine, state)` as one polynomial system with a single family of
/// spanning columns. Satisfiable exactly when such a machine exists.
pub fn encode_problem1(
    machine: &QuantumMealyMachine,
    state: &DensityOperator,
    target_dim: usize,
) -> Result<PolynomialSystem, MinimiseError> {
    encode(machine, state, None, target_dim)
}

/// Encodes the existence of a `target_dim`-dimensional machine that agrees
/// with `(machine, state)` on every experiment using at most `k`
/// measurement points, via one family of spanning columns per measurement
/// count.
pub fn encode_problem2(
    machine: &QuantumMealyMachine,
    state: &DensityOperator,
    k: usize,
    target_dim: usize,
) -> Result<PolynomialSystem, MinimiseError> {
    if k == 0 {
        return Err(MinimiseError::ZeroBudget);
    }
    encode(machine, state, Some(k), target_dim)
}

fn encode(
    machine: &QuantumMealyMachine,
    state: &DensityOperator,
    budget: Option<usize>,
    target_dim: usize,
) -> Result<PolynomialSystem, MinimiseError> {
    let n1 = machine.dimension();
    if state.dimension() != n1 {
        return Err(MinimiseError::DimensionMismatch {
            state: state.dimension(),
            machine: n1,
        });
    }
    if target_dim == 0 || target_dim > n1 {
        return Err(MinimiseError::TargetDimension {
            target: target_dim,
            limit: n1,
        });
    }

    let n2 = target_dim;
    let b1 = n1 * n1;
    let b2 = n2 * n2;
    let nn = b1 + b2;
    let inputs = machine.input_alphabet().len();
    let outputs = machine.output_alphabet().len();
    let levels = budget.map_or(1, |k| k + 1);
    let step_levels = budget.map_or(1, |k| k);
    let level_tag = |l: usize| budget.map(|_| l);
    let title = match budget {
        Some(k) => format!("problem2 k={k} target={n2}"),
        None => format!("problem1 target={n2}"),
    };

    let mut b = SystemBuilder::new(title);

    for s in 0..inputs {
        for i in 0..n2 {
            for j in 0..n2 {
                b.declare_complex(&names::unitary(s, i, j));
            }
        }
    }
    for g in 0..outputs {
        for i in 0..n2 {
            for j in 0..n2 {
                b.declare_complex(&names::measurement(g, i, j));
            }
        }
    }
    for i in 0..n2 {
        for j in 0..n2 {
            b.declare_complex(&names::state_factor(i, j));
        }
    }
    for l in 0..levels {
        for r in 0..nn {
            for c in 0..nn {
                b.declare_complex(&names::column_stack(level_tag(l), r, c));
            }
        }
    }
    for l in 0..levels {
        for s in 0..inputs {
            for r in 0..nn {
                for c in 0..nn {
                    b.declare(names::input_coef(s, level_tag(l), r, c));
                }
            }
        }
    }
    for l in 0..step_levels {
        for g in 0..outputs {
            for r in 0..nn {
                for c in 0..nn {
                    b.declare(names::output_coef(g, level_tag(l), r, c));
                }
            }
        }
    }

    // Caches of variable expressions; all own their data, so the builder
    // stays free for mutation during emission.
    let u2: Vec<Vec<Vec<CExpr>>> = (0..inputs)
        .map(|s| {
            (0..n2)
                .map(|i| {
                    (0..n2)
                        .map(|j| b.complex_entry(&names::unitary(s, i, j)))
                        .collect()
                })
                .collect()
        })
        .collect();
    let m2: Vec<Vec<Vec<CExpr>>> = (0..outputs)
        .map(|g| {
            (0..n2)
                .map(|i| {
                    (0..n2)
                        .map(|j| b.complex_entry(&names::measurement(g, i, j)))
                        .collect()
                })
                .collect()
        })
        .collect();
    let lfac: Vec<Vec<CExpr>> = (0..n2)
        .map(|i| {
            (0..n2)
                .map(|j| b.complex_entry(&names::state_factor(i, j)))
                .collect()
        })
        .collect();
    let f: Vec<Vec<Vec<CExpr>>> = (0..levels)
        .map(|l| {
            (0..nn)
                .map(|r| {
                    (0..nn)
                        .map(|c| b.complex_entry(&names::column_stack(level_tag(l), r, c)))
                        .collect()
                })
                .collect()
        })
        .collect();
    let a_in: Vec<Vec<Vec<Vec<usize>>>> = (0..levels)
        .map(|l| {
            (0..inputs)
                .map(|s| {
                    (0..nn)
                        .map(|r| {
                            (0..nn)
                                .map(|c| b.lookup(&names::input_coef(s, level_tag(l), r, c)))
                                .collect()
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    let a_out: Vec<Vec<Vec<Vec<usize>>>> = (0..step_levels)
        .map(|l| {
            (0..outputs)
                .map(|g| {
                    (0..nn)
                        .map(|r| {
                            (0..nn)
                                .map(|c| b.lookup(&names::output_coef(g, level_tag(l), r, c)))
                                .collect()
                        })
                        .collect()
                })
                .collect()
        })
        .collect();

    let lift1_u: Vec<ComplexMatrix> = (0..inputs)
        .map(|s| lift(machine.unitary(s)).matrix().clone())
        .collect();
    let lift1_m: Vec<ComplexMatrix> = (0..outputs)
        .map(|g| lift(machine.measurement(g)).matrix().clone())
        .collect();
    let vec_rho1 = vectorize(state.matrix());

    // Label suffix for a level: dropped entirely in the single-level case.
    let leveled = |l: usize| match budget {
        Some(_) => format!("{l}_"),
        None => String::new(),
    };

    // Initial column: upper block pinned to the given state, lower block
    // tied to the candidate factor through rho2 = L·L†.
    for r in 0..nn {
        let lhs = f[0][r][0].clone();
        let rhs = if r < b1 {
            CExpr::constant(vec_rho1[r])
        } else {
            let p = r - b1;
            let (i, j) = (p / n2, p % n2);
            let mut acc = CExpr::zero();
            for x in 0..n2 {
                acc = acc.add(&lfac[i][x].mul(&lfac[j][x].conj()));
            }
            acc
        };
        b.push_complex(
            &format!("first_column_{r}"),
            Condition::FirstColumn,
            lhs.sub(&rhs),
        );
    }

    // Every column must carry equal traces in both blocks.
    for l in 0..levels {
        for c in 0..nn {
            let mut acc = CExpr::zero();
            for (r, z) in trace_vector(n1).iter().enumerate() {
                if z.re != 0.0 {
                    acc = acc.add(&f[l][r][c].scale(Complex::new(z.re, 0.0)));
                }
            }
            for (r, z) in trace_vector(n2).iter().enumerate() {
                if z.re != 0.0 {
                    acc = acc.sub(&f[l][b1 + r][c].scale(Complex::new(z.re, 0.0)));
                }
            }
            b.push_complex(
                &format!("block_trace_{}{c}", leveled(l)),
                Condition::TraceOrthogonality,
                acc,
            );
        }
    }

    // Lifted input action closes over each level's columns.
    for l in 0..levels {
        for s in 0..inputs {
            for c in 0..nn {
                // inner[j][x] = Σ_y conj(U[j,y])·F[(x,y), c], shared by all
                // rows of the lower block with second index j.
                let inner: Vec<Vec<CExpr>> = (0..n2)
                    .map(|j| {
                        (0..n2)
                            .map(|x| {
                                let mut acc = CExpr::zero();
                                for y in 0..n2 {
                                    acc = acc
                                        .add(&u2[s][j][y].conj().mul(&f[l][b1 + x * n2 + y][c]));
                                }
                                acc
                            })
                            .collect()
                    })
                    .collect();
                for r in 0..nn {
                    let mut lhs = CExpr::zero();
                    if r < b1 {
                        for x in 0..b1 {
                            let coef = lift1_u[s].get(r, x);
                            if coef.norm_sqr() != 0.0 {
                                lhs = lhs.add(&f[l][x][c].scale(coef));
                            }
                        }
                    } else {
                        let p = r - b1;
                        let (i, j) = (p / n2, p % n2);
                        for x in 0..n2 {
                            lhs = lhs.add(&u2[s][i][x].mul(&inner[j][x]));
                        }
                    }
                    let mut rhs = CExpr::zero();
                    for x in 0..nn {
                        rhs = rhs.add(&f[l][r][x].mul_var(a_in[l][s][x][c]));
                    }
                    b.push_complex(
                        &format!("intertwine_{s}_{}{r}_{c}", leveled(l)),
                        Condition::InputIntertwining,
                        lhs.sub(&rhs),
                    );
                }
            }
        }
    }

    // Lifted measurement action steps into the next level's columns; with
    // a single level it closes over the same columns.
    for l in 0..step_levels {
        let next = if budget.is_some() { l + 1 } else { 0 };
        for g in 0..outputs {
            for c in 0..nn {
                let inner: Vec<Vec<CExpr>> = (0..n2)
                    .map(|j| {
                        (0..n2)
                            .map(|x| {
                                let mut acc = CExpr::zero();
                                for y in 0..n2 {
                                    acc = acc
                                        .add(&m2[g][j][y].conj().mul(&f[l][b1 + x * n2 + y][c]));
                                }
                                acc
                            })
                            .collect()
                    })
                    .collect();
                for r in 0..nn {
                    let mut lhs = CExpr::zero();
                    if r < b1 {
                        for x in 0..b1 {
                            let coef = lift1_m[g].get(r, x);
                            if coef.norm_sqr() != 0.0 {
                                lhs = lhs.add(&f[l][x][c].scale(coef));
                            }
                        }
                    } else {
                        let p = r - b1;
                        let (i, j) = (p / n2, p % n2);
                        for x in 0..n2 {
                            lhs = lhs.add(&m2[g][i][x].mul(&inner[j][x]));
                        }
                    }
                    let mut rhs = CExpr::zero();
                    for x in 0..nn {
                        rhs = rhs.add(&f[next][r][x].mul_var(a_out[l][g][x][c]));
                    }
                    b.push_complex(
                        &format!("measure_step_{g}_{}{r}_{c}", leveled(l)),
                        Condition::MeasurementStepping,
                        lhs.sub(&rhs),
                    );
                }
            }
        }
    }

    // Candidate well-formedness: unitary inputs, complete measurements,
    // unit-trace initial state.
    for s in 0..inputs {
        for i in 0..n2 {
            for j in 0..n2 {
                let mut acc = CExpr::zero();
                for x in 0..n2 {
                    acc = acc.add(&u2[s][x][i].conj().mul(&u2[s][x][j]));
                }
                let delta = if i == j { 1.0 } else { 0.0 };
                acc = acc.sub(&CExpr::constant(Complex::new(delta, 0.0)));
                b.push_complex(
                    &format!("unitary_{s}_{i}_{j}"),
                    Condition::CandidateUnitarity,
                    acc,
                );
            }
        }
    }
    for i in 0..n2 {
        for j in 0..n2 {
            let mut acc = CExpr::zero();
            for g in 0..outputs {
                for x in 0..n2 {
                    acc = acc.add(&m2[g][x][i].conj().mul(&m2[g][x][j]));
                }
            }
            let delta = if i == j { 1.0 } else { 0.0 };
            acc = acc.sub(&CExpr::constant(Complex::new(delta, 0.0)));
            b.push_complex(
                &format!("complete_{i}_{j}"),
                Condition::CandidateCompleteness,
                acc,
            );
        }
    }
    {
        let mut acc = CExpr::zero();
        for i in 0..n2 {
            for x in 0..n2 {
                acc = acc.add(&lfac[i][x].mul(&lfac[i][x].conj()));
            }
        }
        acc = acc.sub(&CExpr::constant(Complex::new(1.0, 0.0)));
        b.push_complex("unit_trace", Condition::CandidateUnitTrace, acc);
    }

    Ok(b.finish())
}

#[cfg(test)]
mod tests {
    use super::super::{construct_witness, verify_assignment, Assignment};
    use super::*;
    use crate::circuits::random::{random_density, random_machine};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn shape_2211() -> (QuantumMealyMachine, DensityOperator) {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let machine = random_machine(2, 2, 2, false, &mut rng);
        let state = random_density(2, &mut rng);
        (machine, state)
    }

    #[test]
    fn bounded_encoding_has_frozen_shape() {
        let (machine, state) = shape_2211();
        let system = encode_problem2(&machine, &state, 2, 1).unwrap();
        assert_eq!(system.variable_count(), 410);
        assert_eq!(system.constraint_count(), 544);
        assert_eq!(system.max_degree(), 3);
        assert_eq!(system.title(), "problem2 k=2 target=1");
    }

    #[test]
    fn unbounded_encoding_has_frozen_shape() {
        let (machine, state) = shape_2211();
        let system = encode_problem1(&machine, &state, 1).unwrap();
        assert_eq!(system.variable_count(), 160);
        assert_eq!(system.constraint_count(), 224);
        assert_eq!(system.max_degree(), 3);
        assert_eq!(system.title(), "problem1 target=1");
    }

    #[test]
    fn unbounded_encoding_is_smaller_than_saturated_bounded_one() {
        // One spanning family beats k+1 of them once the budget k is
        // large enough that bounded and unbounded equivalence coincide.
        let (machine, state) = shape_2211();
        let single = encode_problem1(&machine, &state, 1).unwrap();
        let joint = machine.dimension() + 1;
        let k = joint * joint - 1;
        let layered = encode_problem2(&machine, &state, k, 1).unwrap();
        assert!(single.variable_count() < layered.variable_count());
    }

    #[test]
    fn encode_rejects_bad_parameters() {
        let (machine, state) = shape_2211();
        assert!(matches!(
            encode_problem2(&machine, &state, 0, 1),
            Err(MinimiseError::ZeroBudget)
        ));
        assert!(matches!(
            encode_problem1(&machine, &state, 0),
            Err(MinimiseError::TargetDimension { target: 0, limit: 2 })
        ));
        assert!(matches!(
            encode_problem1(&machine, &state, 3),
            Err(MinimiseError::TargetDimension { target: 3, limit: 2 })
        ));
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        let wide = random_density(3, &mut rng);
        assert!(matches!(
            encode_problem1(&machine, &wide, 1),
            Err(MinimiseError::DimensionMismatch {
                state: 3,
                machine: 2
            })
        ));
        assert!(encode_problem2(&machine, &state, 1, 2).is_ok());
    }

    #[test]
    fn every_emitted_monomial_is_cubic_or_lower() {
        let (machine, state) = shape_2211();
        for system in [
            encode_problem1(&machine, &state, 2).unwrap(),
            encode_problem2(&machine, &state, 2, 2).unwrap(),
        ] {
            for constraint in system.constraints() {
                assert!(!constraint.monomials().is_empty());
                for m in constraint.monomials() {
                    assert!(m.degree() <= 3);
                    assert!(m.coefficient() != 0.0);
                }
            }
        }
    }

    #[test]
    fn all_zeros_assignment_fails_at_the_pinned_first_column() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        let machine = random_machine(2, 2, 2, false, &mut rng);
        let state = DensityOperator::basis_state(2, 0);
        let system = encode_problem1(&machine, &state, 1).unwrap();
        let mut zeros = Assignment::new();
        for name in system.variables() {
            zeros.set(name.clone(), 0.0);
        }
        let report = verify_assignment(&system, &zeros).unwrap();
        assert!(!report.passes());
        // The (0,0) entry of the upper block is pinned to rho[0,0] = 1.
        let labels: Vec<&str> = report.violations().map(|v| v.label()).collect();
        assert!(labels.contains(&"first_column_0_re"), "got {labels:?}");
    }

    #[test]
    fn random_assignment_violates_many_conditions() {
        let (machine, state) = shape_2211();
        let system = encode_problem2(&machine, &state, 1, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(34);
        let mut noise = Assignment::new();
        for name in system.variables() {
            noise.set(name.clone(), rng.gen_range(-1.0..1.0));
        }
        let report = verify_assignment(&system, &noise).unwrap();
        assert!(!report.passes());
        let conditions: std::collections::HashSet<Condition> =
            report.violations().map(|v| v.condition()).collect();
        assert!(conditions.len() >= 3, "got {conditions:?}");
    }

    #[test]
    fn well_formedness_alone_rejects_a_non_unitary_candidate() {
        // Start from a satisfying assignment and corrupt one candidate
        // entry: the unitarity block must flag it regardless of the rest.
        let mut rng = ChaCha8Rng::seed_from_u64(35);
        let machine = random_machine(2, 1, 2, false, &mut rng);
        let state = random_density(2, &mut rng);
        let system = encode_problem2(&machine, &state, 1, 2).unwrap();
        let mut assignment =
            construct_witness(&machine, &state, &machine, &state, Some(1)).unwrap();
        assert!(verify_assignment(&system, &assignment).unwrap().passes());
        let name = format!("{}_re", names::unitary(0, 0, 0));
        let bumped = assignment.get(&name).unwrap() + 0.5;
        assignment.set(name, bumped);
        let report = verify_assignment(&system, &assignment).unwrap();
        assert!(report
            .violations()
            .any(|v| v.condition() == Condition::CandidateUnitarity));
    }

    #[test]
    fn poly_algebra_normalizes_like_terms() {
        let x = Poly::variable(0);
        let y = Poly::variable(1);
        // x·y + y·x − 2·x·y cancels exactly.
        let sum = x.mul(&y).add(&y.mul(&x)).sub(&x.mul(&y).scale(2.0));
        assert!(sum.normalize().is_empty());
        let z = CExpr {
            re: Poly::variable(0),
            im: Poly::variable(1),
        };
        // z·conj(z) has vanishing imaginary part.
        let square = z.mul(&z.conj());
        assert!(square.im.normalize().is_empty());
        let re = square.re.normalize();
        assert_eq!(re.len(), 2);
        assert!(re.iter().all(|m| m.degree() == 2 && m.coefficient() == 1.0));
    }
}
