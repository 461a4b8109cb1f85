use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use forest_balance::bench::{run_bench, to_csv, BenchGrid};
use forest_balance::bounds::BoundReport;
use forest_balance::generators::{
    c0_colouring, make_forest, perturbed_colouring, random_balanced_colouring, ForestKind, ForestSpec, PerturbedParams,
    Rational,
};
use forest_balance::oracle::{
    exact_min_imbalance_guarded, exact_sign, is_sign_fixing, minimal_sign_fixing_subset, SignVerdict, DEFAULT_BUDGET,
    DEFAULT_MAX_N,
};
use forest_balance::solver::{solve, EpsilonPolicy, SolverConfig, Strategy};
use forest_balance::verify::{run_verify, Suite};
use forest_balance::{ColouredCompleteGraph, Error, Forest, PartialEmbedding};

const EXIT_USAGE: u8 = 1;
const EXIT_BOUND_VIOLATION: u8 = 2;
const EXIT_REFUSED: u8 = 3;

#[derive(Parser)]
#[command(name = "forest-balance", version, about = "Low-imbalance forest embeddings in ±1-coloured complete graphs")]
struct Cli {
    /// Worker threads for parallel work (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Embed a forest into a colouring with small imbalance.
    Solve {
        #[arg(long)]
        colouring: PathBuf,
        #[arg(long)]
        forest: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "auto")]
        strategy: String,
        /// Fixed ε as `p/q`; default picks it from n and Δ.
        #[arg(long)]
        epsilon: Option<Rational>,
        #[arg(long, default_value_t = 200)]
        max_restarts: usize,
        #[arg(long, default_value_t = 5000)]
        sample_budget: usize,
        #[arg(long, default_value_t = 8)]
        exact_threshold: usize,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Write the interpolation trace as JSON lines.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Generate a colouring in the text format.
    GenColouring {
        #[arg(long, value_enum)]
        kind: ColouringKind,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        epsilon: Option<Rational>,
        #[arg(long)]
        d: Option<Rational>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate a forest in the text format.
    GenForest {
        #[arg(long)]
        kind: ForestKind,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        max_degree: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Exact answers by enumeration.
    Oracle {
        #[arg(long)]
        colouring: PathBuf,
        #[arg(long)]
        forest: PathBuf,
        /// Partial embedding as JSON `[[v, t], ..]`, inline or a file path.
        #[arg(long)]
        partial: Option<String>,
        #[arg(long, value_enum, default_value = "min")]
        mode: OracleMode,
        /// Extension budget for sign queries.
        #[arg(long, default_value_t = DEFAULT_BUDGET as u64)]
        budget: u64,
        /// Largest n accepted by full enumeration.
        #[arg(long, default_value_t = DEFAULT_MAX_N)]
        max_n: usize,
        /// The set L for sign-fixing queries, comma separated.
        #[arg(long, value_delimiter = ',')]
        fixing: Vec<usize>,
        /// The host set U for sign-fixing queries, comma separated (default: all).
        #[arg(long, value_delimiter = ',')]
        hosts: Vec<usize>,
        /// Also report a minimal sign-fixing subset of L.
        #[arg(long)]
        minimal: bool,
    },
    /// Evaluate every closed-form bound for (n, Δ).
    Bounds {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        delta: usize,
        #[arg(long)]
        eta: Option<Rational>,
    },
    /// Run a property suite; exit 0 iff every property passes.
    Verify {
        #[arg(long)]
        suite: String,
        #[arg(long, value_delimiter = ',')]
        n: Vec<usize>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve a grid of seeded instances and write CSV.
    Bench {
        #[arg(long, value_delimiter = ',', default_values_t = [16usize, 32, 48, 64])]
        n: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_values_t = [ForestKind::Path, ForestKind::Star, ForestKind::Random])]
        families: Vec<ForestKind>,
        #[arg(long, default_value_t = 8)]
        degree_divisor: usize,
        #[arg(long, default_value_t = 5)]
        seeds: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Record wall-clock milliseconds (breaks byte-identical reruns).
        #[arg(long)]
        timing: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ColouringKind {
    Random,
    C0,
    Perturbed,
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleMode {
    Min,
    Sign,
    SignFixing,
}

/// A failure with the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Refused { .. } => EXIT_REFUSED,
            _ => EXIT_USAGE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| usage(format!("reading {}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| usage(format!("writing {}: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(p) => write(p, text),
        None => {
            // a closed pipe (`| head`) is not an error worth reporting
            let _ = writeln!(std::io::stdout().lock(), "{text}");
            Ok(())
        }
    }
}

fn load(colouring: &Path, forest: &Path) -> CliResult<(ColouredCompleteGraph, Forest)> {
    let g = ColouredCompleteGraph::from_text(&read(colouring)?)?;
    let f = Forest::from_text(&read(forest)?)?;
    if f.n() != g.n() {
        return Err(usage(format!("forest has {} vertices, colouring has {}", f.n(), g.n())));
    }
    Ok((g, f))
}

fn to_f64(r: Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

fn pretty(v: &impl serde::Serialize) -> String {
    serde_json::to_string_pretty(v).expect("plain data serialises")
}

fn verdict_json(v: &SignVerdict) -> Value {
    json!({
        "kind": v.kind,
        "min_sum": v.min_sum,
        "max_sum": v.max_sum,
        "min_witness": v.min_witness.to_record(),
        "max_witness": v.max_witness.to_record(),
    })
}

fn parse_partial(arg: &str, n: usize) -> CliResult<PartialEmbedding> {
    let text = if Path::new(arg).is_file() { read(Path::new(arg))? } else { arg.to_string() };
    let pairs: Vec<(usize, usize)> =
        serde_json::from_str(&text).map_err(|e| usage(format!("partial embedding must be [[v, t], ..]: {e}")))?;
    Ok(PartialEmbedding::from_pairs(n, n, pairs)?)
}

fn run(cli: Cli) -> CliResult<u8> {
    if let Some(k) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .map_err(|e| usage(format!("thread pool: {e}")))?;
    }
    match cli.command {
        Command::Solve {
            colouring,
            forest,
            seed,
            strategy,
            epsilon,
            max_restarts,
            sample_budget,
            exact_threshold,
            json,
            trace,
        } => {
            let (g, f) = load(&colouring, &forest)?;
            let cfg = SolverConfig {
                seed,
                max_restarts,
                sample_budget,
                exact_threshold,
                strategy: strategy.parse::<Strategy>()?,
                epsilon: epsilon.map_or(EpsilonPolicy::Auto, |e| EpsilonPolicy::Fixed(to_f64(e))),
                ..SolverConfig::default()
            };
            let result = solve(&f, &g, &cfg)?;
            if let Some(path) = trace {
                let lines: String = result
                    .trace
                    .iter()
                    .flatten()
                    .map(|s| serde_json::to_string(s).expect("plain data") + "\n")
                    .collect();
                write(&path, &lines)?;
            }
            let report = result.report(&g);
            emit(json.as_deref(), &pretty(&report))?;
            if report.balanced_input && !report.within_theorem {
                eprintln!(
                    "bound violation: achieved {} exceeds {:.4} on a balanced input",
                    report.achieved, report.theorem_bound.theorem3
                );
                return Ok(EXIT_BOUND_VIOLATION);
            }
            Ok(0)
        }
        Command::GenColouring {
            kind,
            n,
            seed,
            epsilon,
            d,
            out,
        } => {
            let g = match kind {
                ColouringKind::Random => random_balanced_colouring(n, seed)?,
                ColouringKind::C0 => c0_colouring(n)?,
                ColouringKind::Perturbed => {
                    let eps = epsilon.ok_or_else(|| usage("perturbed colourings need --epsilon"))?;
                    let params = match d {
                        Some(d) => PerturbedParams::new(n, eps, d)?,
                        None => PerturbedParams::with_default_density(n, eps)?,
                    };
                    perturbed_colouring(&params)?
                }
            };
            write(&out, &g.to_text())?;
            Ok(0)
        }
        Command::GenForest {
            kind,
            n,
            max_degree,
            seed,
            out,
        } => {
            let f = make_forest(&ForestSpec::new(kind, n, max_degree, seed))?;
            write(&out, &f.to_text())?;
            Ok(0)
        }
        Command::Oracle {
            colouring,
            forest,
            partial,
            mode,
            budget,
            max_n,
            fixing,
            hosts,
            minimal,
        } => {
            let (g, f) = load(&colouring, &forest)?;
            let n = f.n();
            let budget = budget as u128;
            let value = match mode {
                OracleMode::Min => {
                    let m = exact_min_imbalance_guarded(&f, &g, max_n)?;
                    json!({ "min_imbalance": m.value, "witness": m.witness.to_record() })
                }
                OracleMode::Sign => {
                    let p = match partial {
                        Some(arg) => parse_partial(&arg, n)?,
                        None => PartialEmbedding::empty(n, n),
                    };
                    verdict_json(&exact_sign(&f, &g, &p, budget)?)
                }
                OracleMode::SignFixing => {
                    let u: Vec<usize> = if hosts.is_empty() { (0..n).collect() } else { hosts };
                    let answer = is_sign_fixing(&f, &g, &fixing, &u, budget)?;
                    let mut v = json!({
                        "fixing": answer.fixing,
                        "counterexample": answer.counterexample.as_ref().map(|(p, verdict)| json!({
                            "placement": p.entries().collect::<Vec<_>>(),
                            "verdict": verdict_json(verdict),
                        })),
                    });
                    if minimal && answer.fixing {
                        let m = minimal_sign_fixing_subset(&f, &g, &fixing, &u, budget)?;
                        v["minimal"] = json!({ "m": m.m, "n": m.n_set });
                    }
                    v
                }
            };
            emit(None, &pretty(&value))?;
            Ok(0)
        }
        Command::Bounds { n, delta, eta } => {
            if n == 0 || delta >= n {
                return Err(usage(format!("need 0 <= Δ < n, got n = {n}, Δ = {delta}")));
            }
            emit(None, &pretty(&BoundReport::new(n, delta, eta.map(to_f64))))?;
            Ok(0)
        }
        Command::Verify {
            suite,
            n,
            trials,
            seed,
            out,
        } => {
            let suite: Suite = suite.parse()?;
            let mut spec = suite.default_spec(seed);
            if !n.is_empty() {
                spec.ns = n;
            }
            if let Some(t) = trials {
                spec.trials = t;
            }
            let report = run_verify(&spec)?;
            emit(out.as_deref(), &pretty(&report))?;
            Ok(if report.pass { 0 } else { EXIT_BOUND_VIOLATION })
        }
        Command::Bench {
            n,
            families,
            degree_divisor,
            seeds,
            seed,
            timing,
            out,
        } => {
            let grid = BenchGrid {
                ns: n,
                families,
                degree_divisor,
                seeds_per_cell: seeds,
                timing,
            };
            let rows = run_bench(&grid, seed)?;
            emit(out.as_deref(), to_csv(&rows).trim_end())?;
            if rows.iter().any(|r| !r.within_bound()) {
                eprintln!("bound violation in bench output");
                return Ok(EXIT_BOUND_VIOLATION);
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
