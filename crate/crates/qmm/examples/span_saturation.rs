//! Watch the reachable operator span fill up.
//!
//! Every experiment outcome corresponds to an operator obtained from
//! the initial state by the machine's gates and measurement branches.
//! These operators live in the n²-dimensional space of n x n matrices,
//! so at most n² of them can be linearly independent, and once the span
//! stops growing from one experiment size to the next it never grows
//! again. Machines with all-real entries are confined to the symmetric
//! matrices, a space of dimension n(n+1)/2.
//!
//! Run with `cargo run --example span_saturation`.

use qmm::circuits::random::{random_density, random_machine};
use qmm::linalg::{Complex, ComplexMatrix};
use qmm::model::DensityOperator;
use qmm::oracle::span_profile;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Gram matrix of a random real square factor, normalized to unit
/// trace. Real machines confine real seeds to the symmetric matrices.
fn random_real_density(dim: usize, rng: &mut impl Rng) -> DensityOperator {
    let mut factor = ComplexMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            factor.set(i, j, Complex::new(rng.gen_range(-1.0..1.0), 0.0));
        }
    }
    let gram = factor.matmul(&factor.adjoint());
    let trace = gram.trace().re;
    DensityOperator::new(gram.scale(Complex::new(1.0 / trace, 0.0))).unwrap()
}

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for (dim, real) in [(2usize, false), (3, false), (3, true)] {
        let machine = random_machine(dim, 2, 2, real, &mut rng);
        let rho = if real {
            random_real_density(dim, &mut rng)
        } else {
            random_density(dim, &mut rng)
        };
        let max_size = dim * dim + 1;
        let profile = span_profile(&machine, rho.matrix(), max_size, max_size);

        let flavour = if real { "real" } else { "complex" };
        println!("{flavour} machine, n = {dim}:");
        println!("  span dimension by experiment size: {profile:?}");

        let ceiling = if real { dim * (dim + 1) / 2 } else { dim * dim };
        let saturated = *profile.last().unwrap();
        println!("  saturates at {saturated} (ceiling {ceiling})");
        assert!(saturated <= ceiling);
        // Growth is at least one dimension per size step until it stops,
        // so the final value is reached by size ceiling - 1.
        assert_eq!(profile[ceiling - 1], saturated);

        // Nondecreasing, and flat means flat forever.
        let mut frozen = None;
        for (size, pair) in profile.windows(2).enumerate() {
            assert!(pair[1] >= pair[0]);
            if pair[1] == pair[0] && frozen.is_none() {
                frozen = Some(size);
            }
            if frozen.is_some() {
                assert_eq!(pair[1], pair[0], "span grew after stabilizing");
            }
        }
        if let Some(size) = frozen {
            println!("  stable from size {size} on");
        }
        println!();
    }
}
