//! Compare the incremental span tracker against the naive baseline.
//!
//! Both checkers explore the same reachable operators. The tracker
//! pays O(B·n²) per candidate to extend an orthogonal basis, while the
//! baseline re-runs Gaussian elimination from scratch on every
//! membership query, costing O(B³). The gap widens quickly with the
//! dimension; at n = 16 the tracker is more than an order of magnitude
//! ahead.
//!
//! Run with `cargo run --example speedup_benchmark [max_dim]`
//! (default 8; pass 16 or 32 for the larger cases).

use std::time::{Duration, Instant};

use qmm::circuits::benchmark_suite;
use qmm::equivalence::{check_states, check_states_naive};

fn main() {
    let max_dim: usize = std::env::args()
        .nth(1)
        .map(|arg| arg.parse().expect("max_dim must be an integer"))
        .unwrap_or(8);

    println!(
        "{:<18} {:>4} {:<15} {:>11} {:>11} {:>8}",
        "case", "n", "verdict", "fast (ms)", "naive (ms)", "speedup"
    );
    for case in benchmark_suite() {
        if case.machine.dimension() > max_dim {
            continue;
        }
        let (fast_time, verdict) = time(|| {
            check_states(&case.machine, &case.state_s, &case.state_t).unwrap()
        });
        let (naive_time, naive_verdict) = time(|| {
            check_states_naive(&case.machine, &case.state_s, &case.state_t).unwrap()
        });
        assert_eq!(verdict.equivalent, naive_verdict.equivalent);
        if let Some(expected) = case.expected_equivalent {
            assert_eq!(verdict.equivalent, expected);
        }
        println!(
            "{:<18} {:>4} {:<15} {:>11.2} {:>11.2} {:>7.1}x",
            case.name,
            case.machine.dimension(),
            if verdict.equivalent { "equivalent" } else { "not equivalent" },
            fast_time.as_secs_f64() * 1e3,
            naive_time.as_secs_f64() * 1e3,
            naive_time.as_secs_f64() / fast_time.as_secs_f64()
        );
    }
}

fn time<T>(run: impl Fn() -> T) -> (Duration, T) {
    // Median of three runs; warm caches and scheduler noise dominate
    // single measurements at small sizes.
    let mut times = Vec::with_capacity(3);
    let mut result = None;
    for _ in 0..3 {
        let start = Instant::now();
        result = Some(run());
        times.push(start.elapsed());
    }
    times.sort();
    (times[1], result.unwrap())
}
