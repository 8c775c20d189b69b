//! Definition-level brute force.
//!
//! Everything here works straight from the definitions: experiments are
//! enumerated one by one and their probabilities compared, with no span
//! reasoning and no sharing of work between experiments. The cost is
//! exponential in the size cap, which is the point: these functions are
//! the independent ground truth that the polynomial-time checkers in
//! [`crate::equivalence`] are tested against.
//!
//! An experiment is equivalent to a sequence of moves, each either an
//! input symbol or a measurement outcome: the word is the input moves in
//! order, and each measurement move records the word length so far as its
//! schedule point. Enumeration therefore walks, for each total size s, the
//! strings of length s over the combined alphabet with at most
//! `max_measurements` outcome letters, in lexicographic order with input
//! symbols ordered before outcomes. That matches the breadth-first
//! frontier order of the span search, so when both sides produce a
//! minimum-size witness they produce the same one.

use crate::equivalence::{CheckOptions, EquivalenceError, Verdict, Witness};
use crate::linalg::{ComplexMatrix, SpanTracker};
use crate::model::{DensityOperator, Experiment, QuantumMealyMachine};

/// All experiments with `|word| + |schedule| ≤ max_size` and at most
/// `max_measurements` schedule points, each exactly once, ordered by total
/// size and lexicographically within a size (inputs before outcomes, each
/// alphabet in index order). Memory use is O(max_size).
///
/// # Panics
/// Panics when either alphabet is empty.
pub fn enumerate_experiments(
    input_count: usize,
    output_count: usize,
    max_size: usize,
    max_measurements: usize,
) -> ExperimentEnumeration {
    assert!(input_count > 0, "enumeration needs an input symbol");
    assert!(output_count > 0, "enumeration needs an output symbol");
    ExperimentEnumeration {
        input_count,
        output_count,
        max_size,
        max_measurements,
        moves: Vec::new(),
        measurements: 0,
        state: EnumerationState::Fresh,
    }
}

enum EnumerationState {
    Fresh,
    Running,
    Done,
}

/// Iterator behind [`enumerate_experiments`]: an odometer over move
/// strings. Digits `0..input_count` are input symbols and the rest are
/// measurement outcomes, so plain digit order is the required
/// inputs-before-outcomes order.
pub struct ExperimentEnumeration {
    input_count: usize,
    output_count: usize,
    max_size: usize,
    max_measurements: usize,
    moves: Vec<usize>,
    measurements: usize,
    state: EnumerationState,
}

impl ExperimentEnumeration {
    fn digit_count(&self) -> usize {
        self.input_count + self.output_count
    }

    /// Steps to the next valid move string: bumps the rightmost digit
    /// that can grow (respecting the measurement budget), zeroing
    /// everything after it; when none can, grows the string by one and
    /// restarts it at all zeros (the all-inputs string, always valid).
    fn advance(&mut self) -> bool {
        let digits = self.digit_count();
        let len = self.moves.len();
        let mut i = len;
        while i > 0 {
            i -= 1;
            let digit = self.moves[i];
            let was_measurement = digit >= self.input_count;
            let mut next = digit + 1;
            if !was_measurement
                && next >= self.input_count
                && self.measurements == self.max_measurements
            {
                // No budget for an outcome here: skip that whole range.
                next = digits;
            }
            if next < digits {
                self.moves[i] = next;
                if !was_measurement && next >= self.input_count {
                    self.measurements += 1;
                }
                for tail in &mut self.moves[i + 1..] {
                    *tail = 0;
                }
                return true;
            }
            // Carry past an exhausted digit. Its value is overwritten by a
            // later tail reset; only the budget bookkeeping matters now.
            if was_measurement {
                self.measurements -= 1;
            }
        }
        if len == self.max_size {
            return false;
        }
        self.moves = vec![0; len + 1];
        self.measurements = 0;
        true
    }

    fn current(&self) -> Experiment {
        let mut word = Vec::new();
        let mut points = Vec::new();
        let mut outcomes = Vec::new();
        for &digit in &self.moves {
            if digit < self.input_count {
                word.push(digit);
            } else {
                points.push(word.len());
                outcomes.push(digit - self.input_count);
            }
        }
        Experiment::unchecked(word, points, outcomes)
    }
}

impl Iterator for ExperimentEnumeration {
    type Item = Experiment;

    fn next(&mut self) -> Option<Experiment> {
        match self.state {
            EnumerationState::Fresh => {
                self.state = EnumerationState::Running;
                Some(self.current())
            }
            EnumerationState::Running => {
                if self.advance() {
                    Some(self.current())
                } else {
                    self.state = EnumerationState::Done;
                    None
                }
            }
            EnumerationState::Done => None,
        }
    }
}

/// Closed-form count of what [`enumerate_experiments`] yields: an
/// experiment of size s with j measurement points is a word of length
/// s − j and a nondecreasing choice of j points from 0..=s−j, of which
/// there are C(s, j), so the total is
/// Σ_{s ≤ max_size} Σ_{j ≤ min(s, max_measurements)} C(s,j)·A^(s−j)·G^j.
pub fn experiment_count(
    input_count: usize,
    output_count: usize,
    max_size: usize,
    max_measurements: usize,
) -> u128 {
    let a = input_count as u128;
    let g = output_count as u128;
    let mut total = 0u128;
    for s in 0..=max_size {
        for j in 0..=s.min(max_measurements) {
            total += binomial(s, j) * a.pow((s - j) as u32) * g.pow(j as u32);
        }
    }
    total
}

fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k.min(n));
    let mut acc = 1u128;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Decides bounded equivalence by running every enumerated experiment on
/// both states and comparing probabilities; the first gap above 10⁻⁸
/// becomes the witness. Exponential in `max_size`.
///
/// The verdict's `bound` echoes `max_size`, `basis_sizes` is empty and
/// `real_mode` is false: no span search happened.
pub fn brute_force_equiv(
    machine: &QuantumMealyMachine,
    rho_s: &DensityOperator,
    rho_t: &DensityOperator,
    max_size: usize,
    max_measurements: usize,
) -> Result<Verdict, EquivalenceError> {
    for state in [rho_s, rho_t] {
        if state.dimension() != machine.dimension() {
            return Err(EquivalenceError::DimensionMismatch {
                state: state.dimension(),
                machine: machine.dimension(),
            });
        }
    }
    let alphabet_sizes = (
        machine.input_alphabet().len(),
        machine.output_alphabet().len(),
    );
    for experiment in
        enumerate_experiments(alphabet_sizes.0, alphabet_sizes.1, max_size, max_measurements)
    {
        let prob_s = machine.run_experiment(rho_s, &experiment)?.probability;
        let prob_t = machine.run_experiment(rho_t, &experiment)?.probability;
        if (prob_s - prob_t).abs() > CheckOptions::DEFAULT_TRACE_TOLERANCE {
            return Ok(Verdict {
                equivalent: false,
                witness: Some(Witness {
                    experiment,
                    prob_s,
                    prob_t,
                }),
                basis_sizes: Vec::new(),
                bound: max_size,
                real_mode: false,
            });
        }
    }
    Ok(Verdict {
        equivalent: true,
        witness: None,
        basis_sizes: Vec::new(),
        bound: max_size,
        real_mode: false,
    })
}

/// Span-growth profile of the operators reachable from `rho`: entry m is
/// the dimension of the span of V·rho·V† over all experiments of size at
/// most m (with at most `max_measurements` schedule points), measured by
/// feeding every operator to a fresh tracker in enumeration order.
///
/// `rho` is any Hermitian seed, a density operator or a difference of two.
/// Entry 0 is 1 for nonzero `rho`. The profile never decreases in m, nor
/// entrywise in `max_measurements`.
///
/// # Panics
/// Panics when `rho`'s shape does not match the machine dimension.
pub fn span_profile(
    machine: &QuantumMealyMachine,
    rho: &ComplexMatrix,
    max_size: usize,
    max_measurements: usize,
) -> Vec<usize> {
    let n = machine.dimension();
    assert_eq!(
        (rho.rows(), rho.cols()),
        (n, n),
        "seed shape does not match the machine dimension"
    );
    let mut tracker = SpanTracker::new(n * n);
    let mut profile = vec![0usize; max_size + 1];
    let mut completed = 0usize;
    let input_count = machine.input_alphabet().len();
    let output_count = machine.output_alphabet().len();
    for experiment in
        enumerate_experiments(input_count, output_count, max_size, max_measurements)
    {
        let size = experiment.size();
        // Enumeration is size-major, so a size change means every smaller
        // stratum is complete and its profile entries are final.
        while completed < size {
            profile[completed] = tracker.len();
            completed += 1;
        }
        let v = machine
            .experiment_operator(&experiment)
            .expect("enumerated experiments fit the machine");
        let op = v.matmul(rho).matmul(&v.adjoint());
        tracker.extend(&op);
    }
    for entry in &mut profile[completed..] {
        *entry = tracker.len();
    }
    profile
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::example_machines;
    use crate::circuits::random::{random_density, random_machine};
    use crate::equivalence::check_states;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashSet;

    /// Strings of length exactly `size` over A input and G output letters
    /// with at most `budget` output letters. Independent of both the
    /// iterator and the closed form.
    fn count_strings(a: usize, g: usize, size: usize, budget: usize) -> u128 {
        if size == 0 {
            return 1;
        }
        let mut total = (a as u128) * count_strings(a, g, size - 1, budget);
        if budget > 0 {
            total += (g as u128) * count_strings(a, g, size - 1, budget - 1);
        }
        total
    }

    #[test]
    fn single_symbol_size_one_enumeration_by_hand() {
        let all: Vec<Experiment> = enumerate_experiments(1, 1, 1, 1).collect();
        assert_eq!(all.len(), 3);
        assert_eq!(experiment_count(1, 1, 1, 1), 3);
        // Empty experiment, then the two of size 1: the single input, and
        // a measurement before any input (schedule point 0).
        assert_eq!(all[0], Experiment::empty());
        assert_eq!(all[1].word(), &[0]);
        assert!(all[1].outcomes().is_empty());
        assert!(all[2].word().is_empty());
        assert_eq!(all[2].scheduler().points(), &[0]);
        assert_eq!(all[2].outcomes(), &[0]);
    }

    #[test]
    fn size_zero_yields_only_the_empty_experiment() {
        let all: Vec<Experiment> = enumerate_experiments(3, 2, 0, 0).collect();
        assert_eq!(all, vec![Experiment::empty()]);
    }

    #[test]
    fn counts_match_closed_form_and_recursive_counter() {
        for a in 1..=2 {
            for g in 1..=2 {
                for max_size in 0..=5 {
                    for budget in 0..=max_size {
                        let enumerated =
                            enumerate_experiments(a, g, max_size, budget).count() as u128;
                        let closed = experiment_count(a, g, max_size, budget);
                        let recursive: u128 = (0..=max_size)
                            .map(|s| count_strings(a, g, s, budget))
                            .sum();
                        assert_eq!(enumerated, closed, "A={a} G={g} m={max_size} k={budget}");
                        assert_eq!(enumerated, recursive, "A={a} G={g} m={max_size} k={budget}");
                    }
                }
            }
        }
    }

    #[test]
    fn enumeration_is_duplicate_free_ordered_and_well_formed() {
        let all: Vec<Experiment> = enumerate_experiments(2, 2, 4, 2).collect();
        let mut seen = HashSet::new();
        let mut last_size = 0;
        for e in &all {
            assert!(e.size() >= last_size, "sizes must be nondecreasing");
            last_size = e.size();
            assert!(e.outcomes().len() <= 2);
            assert_eq!(e.outcomes().len(), e.scheduler().points().len());
            for window in e.scheduler().points().windows(2) {
                assert!(window[0] <= window[1]);
            }
            if let Some(&last) = e.scheduler().points().last() {
                assert!(last <= e.word().len());
            }
            let key = (
                e.word().to_vec(),
                e.scheduler().points().to_vec(),
                e.outcomes().to_vec(),
            );
            assert!(seen.insert(key), "duplicate experiment {e:?}");
        }
        assert_eq!(all.len() as u128, experiment_count(2, 2, 4, 2));
    }

    #[test]
    fn enumeration_starts_with_the_hand_computed_prefix() {
        // Size 1 stratum for two inputs and one outcome: inputs in index
        // order first, then the measurement at point 0.
        let all: Vec<Experiment> = enumerate_experiments(2, 1, 2, 1).collect();
        assert_eq!(all[0], Experiment::empty());
        assert_eq!(all[1].word(), &[0]);
        assert_eq!(all[2].word(), &[1]);
        assert_eq!((all[3].word(), all[3].scheduler().points()), (&[][..], &[0][..]));
        // Size 2 opens with the all-input strings.
        assert_eq!(all[4].word(), &[0, 0]);
        assert_eq!(all[5].word(), &[0, 1]);
        // [0, measure]: the point sits after the first symbol.
        assert_eq!((all[6].word(), all[6].scheduler().points()), (&[0][..], &[1][..]));
    }

    #[test]
    fn controlled_not_pair_stays_equivalent_under_brute_force() {
        let (machine, states) = example_machines::controlled_not_machine();
        let verdict =
            brute_force_equiv(&machine, &states["00"], &states["01"], 6, 6).unwrap();
        assert!(verdict.equivalent);
        assert!(verdict.witness.is_none());
    }

    #[test]
    fn extended_machine_splits_between_sizes_three_and_five() {
        let (machine, states) = example_machines::extended_controlled_not_machine();
        let small = brute_force_equiv(&machine, &states["00"], &states["01"], 3, 3).unwrap();
        assert!(small.equivalent);
        let large = brute_force_equiv(&machine, &states["00"], &states["01"], 5, 5).unwrap();
        assert!(!large.equivalent);
        let witness = large.witness.unwrap();
        assert_eq!(witness.experiment.size(), 5);
        assert!(witness.gap() > 1e-6);
    }

    #[test]
    fn bell_pair_needs_a_second_measurement() {
        let (machine, states) = example_machines::swap_hadamard_machine();
        let one = brute_force_equiv(&machine, &states["bell00"], &states["bell10"], 12, 1)
            .unwrap();
        assert!(one.equivalent);
        let two = brute_force_equiv(&machine, &states["bell00"], &states["bell10"], 5, 2)
            .unwrap();
        assert!(!two.equivalent);
        let witness = two.witness.unwrap();
        assert_eq!(witness.experiment.outcomes().len(), 2);
        assert!(witness.gap() > 1e-6);
    }

    #[test]
    fn brute_force_rejects_mismatched_state_dimension() {
        let (machine, _) = example_machines::controlled_not_machine();
        let small = DensityOperator::basis_state(2, 0);
        assert!(matches!(
            brute_force_equiv(&machine, &small, &small, 3, 3),
            Err(EquivalenceError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn brute_force_agrees_with_span_search_on_random_machines() {
        let mut rng = ChaCha8Rng::seed_from_u64(61_409);
        for round in 0..8 {
            let machine = random_machine(2, 2, 2, round % 2 == 0, &mut rng);
            let rho_s = random_density(2, &mut rng);
            let rho_t = random_density(2, &mut rng);
            let fast = check_states(&machine, &rho_s, &rho_t).unwrap();
            let brute = brute_force_equiv(&machine, &rho_s, &rho_t, 3, 3).unwrap();
            assert_eq!(fast.equivalent, brute.equivalent, "round {round}");
        }
    }

    #[test]
    fn profile_starts_at_one_and_never_decreases() {
        let mut rng = ChaCha8Rng::seed_from_u64(500);
        let machine = random_machine(2, 2, 2, false, &mut rng);
        let rho = random_density(2, &mut rng);
        let mut previous: Option<Vec<usize>> = None;
        for budget in 0..=3 {
            let profile = span_profile(&machine, rho.matrix(), 6, budget);
            assert_eq!(profile[0], 1);
            for pair in profile.windows(2) {
                assert!(pair[0] <= pair[1], "profile must be nondecreasing in size");
            }
            if let Some(prev) = &previous {
                for (lo, hi) in prev.iter().zip(&profile) {
                    assert!(lo <= hi, "profile must be nondecreasing in the budget");
                }
            }
            previous = Some(profile);
        }
    }

    #[test]
    fn profile_saturates_by_the_dimension_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(77_001);
        for &n in &[2usize, 2, 3] {
            let machine = random_machine(n, 2, 2, false, &mut rng);
            let rho = random_density(n, &mut rng);
            let bound = n * n - 1;
            let profile = span_profile(&machine, rho.matrix(), bound + 3, bound + 3);
            assert_eq!(
                profile[bound],
                *profile.last().unwrap(),
                "n={n}: span kept growing past the saturation bound"
            );
        }
    }

    #[test]
    fn real_machine_profile_saturates_by_the_symmetric_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(88_123);
        let n = 3;
        let machine = random_machine(n, 2, 2, true, &mut rng);
        let seed = random_density(n, &mut rng).matrix().real_part();
        let bound = n * (n + 1) / 2 - 1;
        let profile = span_profile(&machine, &seed, 8, 8);
        assert_eq!(profile[bound], *profile.last().unwrap());
        assert!(*profile.last().unwrap() <= n * (n + 1) / 2);
    }

    #[test]
    fn flat_step_across_all_budgets_is_permanent() {
        let mut rng = ChaCha8Rng::seed_from_u64(13_577);
        let machine = random_machine(2, 2, 2, false, &mut rng);
        let rho = random_density(2, &mut rng);
        let budget_cap = 2;
        let profiles: Vec<Vec<usize>> = (0..=budget_cap)
            .map(|k| span_profile(&machine, rho.matrix(), 7, k))
            .collect();
        let flat_at = (0..7).find(|&m| {
            profiles.iter().all(|p| p[m] == p[m + 1])
        });
        let m = flat_at.expect("profiles must flatten within the size cap");
        for profile in &profiles {
            for later in m..7 {
                assert_eq!(
                    profile[later],
                    profile[m],
                    "a jointly flat step must stay flat"
                );
            }
        }
    }
}
