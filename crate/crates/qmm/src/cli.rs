//! Command-line surface over the library.
//!
//! Four subcommands: `validate` parses a `.qmm` file and reports
//! well-formedness residuals, `check` decides state or machine
//! equivalence (optionally budgeted, against the naive baseline, or
//! cross-checked with the brute-force oracle), `bench` times the fast
//! checker against the naive one on the shipped suite, and `encode-min`
//! writes a minimisation instance in the polynomial-system text format.
//!
//! Exit codes: 0 success (a NOT EQUIVALENT verdict is a success), 2 for
//! unreadable or unparseable input files and usage errors, 3 for
//! validation failures (ill-formed machines, unknown state names,
//! out-of-range target dimensions), 4 when the oracle cross-check
//! disagrees with the checker. Verdicts and counts go to stdout;
//! diagnostics go to stderr.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use clap::{Parser, Subcommand};
use serde_json::json;

use crate::circuits::{benchmark_suite, parse_machine_spec, BenchCase};
use crate::equivalence::{
    check_machines_with, check_states_k_with, check_states_naive_with, check_states_with,
    CheckOptions, Verdict,
};
use crate::minimise::{encode_problem1, encode_problem2};
use crate::model::{DensityOperator, QuantumMealyMachine};
use crate::oracle::brute_force_equiv;

#[derive(Parser)]
#[command(
    name = "qmm",
    version,
    about = "Quantum Mealy machines: validation, equivalence checking, benchmarks, minimisation encodings"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a .qmm file and report dimensions and operator residuals.
    Validate {
        /// Machine description file.
        file: PathBuf,
    },
    /// Decide whether two states (or two machines) are equivalent.
    Check {
        /// Machine description file.
        file: PathBuf,
        /// Name of the first state, declared in FILE.
        state_s: String,
        /// Name of the second state; declared in FILE, or in the
        /// --machines file when that is given.
        state_t: String,
        /// Bound the number of measurement points per experiment.
        #[arg(long)]
        k: Option<usize>,
        /// Compare (FILE, STATE_S) against (MACHINES, STATE_T) as whole
        /// machines; the two files must share alphabets.
        #[arg(long)]
        machines: Option<PathBuf>,
        /// Use the Gaussian-elimination baseline store instead of the
        /// span tracker (same verdicts, O(n⁸) instead of O(n⁶)).
        #[arg(long, conflicts_with_all = ["machines", "k"])]
        naive: bool,
        /// Cross-check against brute-force enumeration of all experiments
        /// up to this size (at most 12); exits 4 on disagreement.
        #[arg(long = "oracle-size", conflicts_with = "machines")]
        oracle_size: Option<usize>,
        /// Probability-gap tolerance for the verdict (default 1e-8).
        #[arg(long)]
        tolerance: Option<f64>,
        /// Emit the verdict as a single JSON object on stdout.
        #[arg(long)]
        json: bool,
        /// Use complex-case bounds even when every operator is real.
        #[arg(long = "force-complex")]
        force_complex: bool,
    },
    /// Time the fast checker against the naive baseline on the shipped
    /// benchmark suite.
    Bench {
        /// Only run cases whose name contains this substring.
        filter: Option<String>,
        /// Timed runs per case and method; medians are reported.
        #[arg(long, default_value_t = 3)]
        repeat: usize,
        /// Worker threads running distinct cases concurrently. More than
        /// one speeds the suite up but lets cases contend for cores, so
        /// reported times get noisier.
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// Encode "does a smaller equivalent machine exist?" as a polynomial
    /// system and write its text form.
    EncodeMin {
        /// Machine description file.
        file: PathBuf,
        /// Name of the initial state, declared in FILE.
        state: String,
        /// 1 for unbounded equivalence, 2 for measurement-budgeted.
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        problem: u8,
        /// Measurement budget; required by --problem 2, meaningless
        /// otherwise.
        #[arg(long)]
        k: Option<usize>,
        /// Candidate dimension (default: machine dimension minus one).
        /// Must be at least 1 and strictly below the machine dimension.
        #[arg(long = "target-dim")]
        target_dim: Option<usize>,
        /// Write the system here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Failure {
        Failure {
            code,
            message: message.into(),
        }
    }
}

/// Rust ignores SIGPIPE by default, turning a closed pipe (`| head`)
/// into a println panic; the default disposition dies quietly instead.
#[cfg(unix)]
fn reset_sigpipe() {
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
}

#[cfg(not(unix))]
fn reset_sigpipe() {}

pub fn main() {
    reset_sigpipe();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Validate { file } => cmd_validate(&file),
        Command::Check {
            file,
            state_s,
            state_t,
            k,
            machines,
            naive,
            oracle_size,
            tolerance,
            json,
            force_complex,
        } => cmd_check(
            &file,
            &state_s,
            &state_t,
            k,
            machines.as_deref(),
            naive,
            oracle_size,
            tolerance,
            json,
            force_complex,
        ),
        Command::Bench {
            filter,
            repeat,
            workers,
        } => cmd_bench(filter.as_deref(), repeat, workers),
        Command::EncodeMin {
            file,
            state,
            problem,
            k,
            target_dim,
            out,
        } => cmd_encode_min(&file, &state, problem, k, target_dim, out.as_deref()),
    };
    if let Err(failure) = outcome {
        eprintln!("error: {}", failure.message);
        std::process::exit(failure.code);
    }
}

struct LoadedMachine {
    machine: QuantumMealyMachine,
    states: BTreeMap<String, DensityOperator>,
}

fn load_machine(path: &Path) -> Result<LoadedMachine, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::new(2, format!("cannot read {}: {e}", path.display())))?;
    let spec = parse_machine_spec(&text)
        .map_err(|e| Failure::new(2, format!("{}: {e}", path.display())))?;
    let machine = spec
        .build_machine()
        .map_err(|e| Failure::new(3, format!("{}: {e}", path.display())))?;
    let states = spec
        .initial_states()
        .map_err(|e| Failure::new(3, format!("{}: {e}", path.display())))?;
    Ok(LoadedMachine { machine, states })
}

fn lookup_state(
    loaded: &LoadedMachine,
    name: &str,
    path: &Path,
) -> Result<DensityOperator, Failure> {
    loaded.states.get(name).cloned().ok_or_else(|| {
        let known: Vec<&str> = loaded.states.keys().map(String::as_str).collect();
        Failure::new(
            3,
            format!(
                "state {name:?} is not declared in {} (declared: {})",
                path.display(),
                known.join(", ")
            ),
        )
    })
}

fn cmd_validate(file: &Path) -> Result<(), Failure> {
    let loaded = load_machine(file)?;
    let m = &loaded.machine;
    println!(
        "valid, n={}, |Σ|={}, |Γ|={}",
        m.dimension(),
        m.input_alphabet().len(),
        m.output_alphabet().len()
    );
    let identity = crate::linalg::ComplexMatrix::identity(m.dimension());
    let unitarity = (0..m.input_alphabet().len())
        .map(|s| {
            let u = m.unitary(s);
            u.adjoint().matmul(u).max_abs_diff(&identity)
        })
        .fold(0.0f64, f64::max);
    let mut sum = crate::linalg::ComplexMatrix::zeros(m.dimension(), m.dimension());
    for g in 0..m.output_alphabet().len() {
        let op = m.measurement(g);
        sum = sum.add(&op.adjoint().matmul(op));
    }
    println!("unitarity residual: {unitarity:.3e}");
    println!("completeness residual: {:.3e}", sum.max_abs_diff(&identity));
    let names: Vec<&str> = loaded.states.keys().map(String::as_str).collect();
    println!("states: {}", names.join(" "));
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_check(
    file: &Path,
    state_s: &str,
    state_t: &str,
    k: Option<usize>,
    machines: Option<&Path>,
    naive: bool,
    oracle_size: Option<usize>,
    tolerance: Option<f64>,
    json: bool,
    force_complex: bool,
) -> Result<(), Failure> {
    let first = load_machine(file)?;
    let rho_s = lookup_state(&first, state_s, file)?;
    let mut options = CheckOptions::default();
    if let Some(t) = tolerance {
        if !(t > 0.0) {
            return Err(Failure::new(2, "--tolerance must be positive"));
        }
        options.trace_tolerance = t;
    }
    options.force_complex = force_complex;

    let verdict = if let Some(second_path) = machines {
        let second = load_machine(second_path)?;
        let rho_t = lookup_state(&second, state_t, second_path)?;
        check_machines_with(&first.machine, &rho_s, &second.machine, &rho_t, k, &options)
            .map_err(|e| Failure::new(3, e.to_string()))?
    } else {
        let rho_t = lookup_state(&first, state_t, file)?;
        if naive {
            check_states_naive_with(&first.machine, &rho_s, &rho_t, &options)
        } else if let Some(budget) = k {
            check_states_k_with(&first.machine, &rho_s, &rho_t, budget, &options)
        } else {
            check_states_with(&first.machine, &rho_s, &rho_t, &options)
        }
        .map_err(|e| Failure::new(3, e.to_string()))?
    };

    if json {
        println!("{}", verdict_json(&verdict, k, &first.machine));
    } else {
        print_verdict(&verdict, k, &first.machine);
    }

    if let Some(horizon) = oracle_size {
        if !(1..=12).contains(&horizon) {
            return Err(Failure::new(2, "--oracle-size must lie in 1..=12"));
        }
        if horizon > 8 {
            eprintln!(
                "note: oracle horizon {horizon} enumerates every experiment of size <= {horizon}; \
                 expect a long run"
            );
        }
        let rho_t = lookup_state(&first, state_t, file)?;
        let budget = k.unwrap_or(horizon);
        let oracle = brute_force_equiv(&first.machine, &rho_s, &rho_t, horizon, budget)
            .map_err(|e| Failure::new(3, e.to_string()))?;
        if cross_check(&verdict, &oracle, horizon)? {
            eprintln!("oracle agrees (horizon {horizon})");
        }
    }
    Ok(())
}

/// The oracle sees experiments up to its horizon only, so a fast verdict
/// of NOT EQUIVALENT with a witness beyond the horizon is consistent with
/// the oracle finding nothing. Returns whether the check was conclusive.
fn cross_check(fast: &Verdict, oracle: &Verdict, horizon: usize) -> Result<bool, Failure> {
    if fast.equivalent == oracle.equivalent {
        return Ok(true);
    }
    if fast.equivalent {
        let detail = oracle
            .witness
            .as_ref()
            .map(|w| format!(" (oracle gap {:.3e})", w.gap()))
            .unwrap_or_default();
        return Err(Failure::new(
            4,
            format!("oracle found a distinguishing experiment the checker missed{detail}"),
        ));
    }
    match &fast.witness {
        Some(w) if w.experiment.size() > horizon => {
            eprintln!(
                "note: checker witness has size {} beyond oracle horizon {horizon}; \
                 cross-check inconclusive",
                w.experiment.size()
            );
            Ok(false)
        }
        _ => Err(Failure::new(
            4,
            format!("checker reported non-equivalence within the oracle horizon {horizon}, but the oracle found no gap"),
        )),
    }
}

fn print_verdict(verdict: &Verdict, k: Option<usize>, machine: &QuantumMealyMachine) {
    if verdict.equivalent {
        match k {
            Some(budget) => println!("EQUIVALENT (k={budget})"),
            None => println!(
                "EQUIVALENT (bound {}, basis {} of max {})",
                verdict.bound,
                verdict.basis_size(),
                verdict.max_basis_size()
            ),
        }
    } else {
        match k {
            Some(budget) => println!("NOT EQUIVALENT (k={budget})"),
            None => println!("NOT EQUIVALENT"),
        }
        if let Some(w) = &verdict.witness {
            let (word, outcomes) = w.experiment.render(machine);
            let schedule = w
                .experiment
                .scheduler()
                .points()
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join(" ");
            println!(
                "word={word}, schedule={schedule}, outcomes={outcomes}, p_s={}, p_t={}",
                w.prob_s, w.prob_t
            );
        }
    }
}

fn verdict_json(
    verdict: &Verdict,
    k: Option<usize>,
    machine: &QuantumMealyMachine,
) -> serde_json::Value {
    json!({
        "equivalent": verdict.equivalent,
        "k": k,
        "bound": verdict.bound,
        "real_mode": verdict.real_mode,
        "basis_sizes": verdict.basis_sizes,
        "basis_size": verdict.basis_size(),
        "max_basis_size": verdict.max_basis_size(),
        "witness": verdict.witness.as_ref().map(|w| json!({
            "word": w.experiment.word().iter()
                .map(|&s| machine.input_alphabet()[s].clone())
                .collect::<Vec<_>>(),
            "schedule": w.experiment.scheduler().points(),
            "outcomes": w.experiment.outcomes().iter()
                .map(|&o| machine.output_alphabet()[o].clone())
                .collect::<Vec<_>>(),
            "size": w.experiment.size(),
            "closed": w.experiment.is_closed(),
            "p_s": w.prob_s,
            "p_t": w.prob_t,
            "gap": w.gap(),
        })),
    })
}

struct BenchRow {
    name: String,
    dimension: usize,
    fast_equivalent: bool,
    naive_equivalent: bool,
    expected: Option<bool>,
    fast: Duration,
    naive: Duration,
}

fn cmd_bench(filter: Option<&str>, repeat: usize, workers: usize) -> Result<(), Failure> {
    if repeat == 0 {
        return Err(Failure::new(2, "--repeat must be at least 1"));
    }
    if workers == 0 {
        return Err(Failure::new(2, "--workers must be at least 1"));
    }
    let suite = benchmark_suite();
    let cases: Vec<&BenchCase> = suite
        .iter()
        .filter(|c| filter.map_or(true, |f| c.name.contains(f)))
        .collect();
    if cases.is_empty() {
        return Err(Failure::new(2, "no benchmark case matches the filter"));
    }
    if workers > 1 {
        eprintln!("note: {workers} workers share cores; medians get noisier");
    }

    let rows: Vec<Mutex<Option<BenchRow>>> = cases.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for _ in 0..workers.min(cases.len()) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= cases.len() {
                    break;
                }
                let row = run_bench_case(cases[i], repeat);
                *rows[i].lock().expect("bench row lock") = Some(row);
            });
        }
    });

    println!(
        "{:<18} {:>4} {:<14} {:>12} {:>12} {:>9}  {}",
        "case", "n", "verdict", "fast (ms)", "naive (ms)", "speedup", "agreement"
    );
    for slot in &rows {
        let row = slot
            .lock()
            .expect("bench row lock")
            .take()
            .expect("every case ran");
        let verdict = if row.fast_equivalent {
            "equivalent"
        } else {
            "not equivalent"
        };
        let agreement = if row.fast_equivalent != row.naive_equivalent {
            "NAIVE DISAGREES"
        } else {
            match row.expected {
                Some(e) if e != row.fast_equivalent => "UNEXPECTED",
                Some(_) => "ok",
                None => "ok (no expectation)",
            }
        };
        let fast_ms = row.fast.as_secs_f64() * 1e3;
        let naive_ms = row.naive.as_secs_f64() * 1e3;
        println!(
            "{:<18} {:>4} {:<14} {:>12.2} {:>12.2} {:>8.1}x  {}",
            row.name,
            row.dimension,
            verdict,
            fast_ms,
            naive_ms,
            naive_ms / fast_ms,
            agreement
        );
        if row.fast_equivalent != row.naive_equivalent {
            eprintln!("warning: {}: fast and naive verdicts differ", row.name);
        }
    }
    Ok(())
}

fn run_bench_case(case: &BenchCase, repeat: usize) -> BenchRow {
    let options = CheckOptions::default();
    let mut fast_times = Vec::with_capacity(repeat);
    let mut fast_equivalent = false;
    for _ in 0..repeat {
        let start = Instant::now();
        let verdict = check_states_with(&case.machine, &case.state_s, &case.state_t, &options)
            .expect("suite states match their machines");
        fast_times.push(start.elapsed());
        fast_equivalent = verdict.equivalent;
    }
    let mut naive_times = Vec::with_capacity(repeat);
    let mut naive_equivalent = false;
    for _ in 0..repeat {
        let start = Instant::now();
        let verdict =
            check_states_naive_with(&case.machine, &case.state_s, &case.state_t, &options)
                .expect("suite states match their machines");
        naive_times.push(start.elapsed());
        naive_equivalent = verdict.equivalent;
    }
    BenchRow {
        name: case.name.clone(),
        dimension: case.machine.dimension(),
        fast_equivalent,
        naive_equivalent,
        expected: case.expected_equivalent,
        fast: median(fast_times),
        naive: median(naive_times),
    }
}

fn median(mut times: Vec<Duration>) -> Duration {
    times.sort();
    let n = times.len();
    if n % 2 == 1 {
        times[n / 2]
    } else {
        (times[n / 2 - 1] + times[n / 2]) / 2
    }
}

fn cmd_encode_min(
    file: &Path,
    state: &str,
    problem: u8,
    k: Option<usize>,
    target_dim: Option<usize>,
    out: Option<&Path>,
) -> Result<(), Failure> {
    let loaded = load_machine(file)?;
    let rho = lookup_state(&loaded, state, file)?;
    let dimension = loaded.machine.dimension();
    if target_dim == Some(0) {
        return Err(Failure::new(2, "--target-dim must be at least 1"));
    }
    let target = target_dim.unwrap_or_else(|| dimension.saturating_sub(1));
    if target == 0 || target >= dimension {
        return Err(Failure::new(
            3,
            format!("target dimension {target} must satisfy 1 <= target < n = {dimension}"),
        ));
    }
    let system = match problem {
        1 => {
            if k.is_some() {
                return Err(Failure::new(2, "--k only applies to --problem 2"));
            }
            encode_problem1(&loaded.machine, &rho, target)
        }
        2 => {
            let budget = k.ok_or_else(|| Failure::new(2, "--problem 2 requires --k"))?;
            encode_problem2(&loaded.machine, &rho, budget, target)
        }
        _ => unreachable!("clap restricts --problem to 1..=2"),
    }
    .map_err(|e| Failure::new(3, e.to_string()))?;

    match out {
        Some(path) => {
            let file = fs::File::create(path)
                .map_err(|e| Failure::new(2, format!("cannot write {}: {e}", path.display())))?;
            let mut writer = BufWriter::new(file);
            system
                .write_text(&mut writer)
                .and_then(|()| writer.flush())
                .map_err(|e| Failure::new(2, format!("cannot write {}: {e}", path.display())))?;
            println!("variables {}", system.variable_count());
            println!("constraints {}", system.constraint_count());
            eprintln!("wrote {}", path.display());
        }
        None => {
            let stdout = io::stdout();
            let mut writer = BufWriter::new(stdout.lock());
            system
                .write_text(&mut writer)
                .and_then(|()| writer.flush())
                .map_err(|e| Failure::new(2, format!("cannot write to stdout: {e}")))?;
            eprintln!("variables {}", system.variable_count());
            eprintln!("constraints {}", system.constraint_count());
        }
    }
    Ok(())
}
