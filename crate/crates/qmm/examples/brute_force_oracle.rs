//! Cross-check the polynomial-time checker against exhaustive search.
//!
//! The oracle enumerates every experiment up to a size bound and
//! compares outcome probabilities directly. It is exponentially slower
//! than the span-based checker but trivially correct, which makes it a
//! good referee on small machines. For a machine of dimension n the
//! checker's verdicts are already determined by experiments of size
//! n² - 1, so agreement up to that bound is agreement everywhere.
//!
//! Run with `cargo run --example brute_force_oracle`.

use qmm::circuits::random::{random_density, random_machine};
use qmm::equivalence::check_states;
use qmm::oracle::{brute_force_equiv, experiment_count};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut checked = 0usize;
    let mut disagreements = 0usize;

    for trial in 0..20 {
        let machine = random_machine(2, 2, 2, false, &mut rng);
        let rho_s = random_density(2, &mut rng);
        let rho_t = if trial % 4 == 0 {
            rho_s.clone()
        } else {
            random_density(2, &mut rng)
        };
        let max_size = machine.dimension() * machine.dimension() - 1;

        let fast = check_states(&machine, &rho_s, &rho_t).unwrap();
        let slow = brute_force_equiv(&machine, &rho_s, &rho_t, max_size, max_size).unwrap();
        checked += 1;
        if fast.equivalent != slow.equivalent {
            disagreements += 1;
            println!(
                "trial {trial}: checker says {}, oracle says {}",
                fast.equivalent, slow.equivalent
            );
        }
    }
    println!("{checked} random state pairs checked, {disagreements} disagreements");
    assert_eq!(disagreements, 0);

    // The price of exhaustiveness: the number of experiments explodes
    // with the size bound.
    println!("\nexperiments over 2 inputs and 2 outcomes, by size bound:");
    for bound in 1..=6 {
        println!("  size <= {bound}: {}", experiment_count(2, 2, bound, bound));
    }
}
