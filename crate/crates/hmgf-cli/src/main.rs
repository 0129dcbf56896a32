//! `hmgf` command line: solve, predict, generate, evaluate.
//!
//! Exit codes: 0 success, 1 usage/parse/validation error, 2 resource
//! error (ball limit, time budget), 3 no solution.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};

use hmgf::eval::{dks_comparator, gen_random, run_experiment, EvalError, GenSpec, SweepConfig};
use hmgf::exact::{solve_exact, ExactConfig, ExactError};
use hmgf::linkpred::{score_pairs, select_edges, Method, SelectionMode, SelectionPolicy};
use hmgf::maxgf::{solve_maxgf, MaxGFConfig, RadiusMode};
use hmgf::{parse_graph, HeteroGraph, Query, Solution, SolutionDocument};

const EXIT_USAGE: u8 = 1;
const EXIT_RESOURCE: u8 = 2;
const EXIT_NO_SOLUTION: u8 = 3;

#[derive(Parser)]
#[command(name = "hmgf", version, about = "Hop-bounded maximum group friending")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance and print the solution document as JSON
    Solve(SolveArgs),
    /// Derive potential edges from a friends-only graph
    Predict(PredictArgs),
    /// Generate a seeded random graph file
    Generate(GenerateArgs),
    /// Run a sweep experiment from a key=value config file
    Evaluate(EvaluateArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum SolverArg {
    Maxgf,
    Exact,
    Dks,
}

#[derive(Clone, Copy, ValueEnum)]
enum RadiusArg {
    Guarantee,
    Tight,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, value_enum)]
    solver: SolverArg,
    #[arg(long)]
    hops: u32,
    #[arg(long)]
    min_size: usize,
    #[arg(long, value_enum, default_value = "guarantee")]
    radius_mode: RadiusArg,
    #[arg(long)]
    strict_only: bool,
    #[arg(long)]
    no_prune: bool,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    #[arg(long, default_value_t = 25)]
    max_ball_size: usize,
    #[arg(long)]
    time_budget_ms: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct PredictArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, default_value = "aa")]
    method: String,
    #[arg(long, conflicts_with = "threshold")]
    top_k: Option<usize>,
    #[arg(long)]
    threshold: Option<f64>,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0.3)]
    friend_prob: f64,
    #[arg(long, default_value_t = 0.2)]
    potential_prob: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long)]
    config: PathBuf,
    /// Overrides out_dir from the config file
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version are not usage errors
            if e.use_stderr() {
                eprintln!("{e}");
                return ExitCode::from(EXIT_USAGE);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    match cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Predict(args) => cmd_predict(args),
        Command::Generate(args) => cmd_generate(args),
        Command::Evaluate(args) => cmd_evaluate(args),
    }
}

fn usage(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(EXIT_USAGE)
}

fn load_graph(path: &PathBuf) -> Result<HeteroGraph, ExitCode> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| usage(format_args!("cannot read {}: {e}", path.display())))?;
    parse_graph(&text).map_err(usage)
}

fn cmd_solve(args: SolveArgs) -> ExitCode {
    let g = match load_graph(&args.graph) {
        Ok(g) => g,
        Err(code) => return code,
    };
    let q = match Query::new(args.hops, args.min_size) {
        Ok(q) => q,
        Err(msg) => return usage(msg),
    };
    if args.threads == 0 {
        return usage("threads must be \u{2265} 1");
    }
    if q.p > g.n() {
        eprintln!("no feasible group: p={} exceeds |V|={}", q.p, g.n());
        return ExitCode::from(EXIT_NO_SOLUTION);
    }

    let config_echo = serde_json::json!({
        "solver": solver_name(args.solver),
        "radius_mode": match args.radius_mode { RadiusArg::Guarantee => "guarantee", RadiusArg::Tight => "tight" },
        "strict_only": args.strict_only,
        "prune": !args.no_prune,
        "threads": args.threads,
        "max_ball_size": args.max_ball_size,
        "seed": args.seed,
    });

    let solved: Result<Option<Solution>, ExitCode> = match args.solver {
        SolverArg::Exact => {
            let cfg = ExactConfig {
                max_ball_size: args.max_ball_size,
                time_budget: args.time_budget_ms.map(Duration::from_millis),
            };
            match solve_exact(&g, &q, &cfg) {
                Ok(s) => Ok(s),
                Err(e @ (ExactError::BallTooLarge { .. } | ExactError::TimeBudgetExceeded)) => {
                    eprintln!("error: {e}");
                    Err(ExitCode::from(EXIT_RESOURCE))
                }
                Err(e) => Err(usage(e)),
            }
        }
        SolverArg::Maxgf => {
            let cfg = MaxGFConfig {
                radius_mode: match args.radius_mode {
                    RadiusArg::Guarantee => RadiusMode::Guarantee,
                    RadiusArg::Tight => RadiusMode::Tight,
                },
                strict_only: args.strict_only,
                parallel_candidates: args.threads > 1,
                prune: !args.no_prune,
            };
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(args.threads)
                .build()
                .expect("thread pool construction");
            Ok(pool.install(|| solve_maxgf(&g, &q, &cfg)))
        }
        SolverArg::Dks => match dks_comparator(&g, q.p, &q) {
            Ok(s) => Ok(Some(s)),
            Err(e) => Err(usage(e)),
        },
    };
    let solution = match solved {
        Ok(Some(s)) => s,
        Ok(None) => {
            eprintln!("no solution for h={} p={}", q.h, q.p);
            return ExitCode::from(EXIT_NO_SOLUTION);
        }
        Err(code) => return code,
    };
    let doc = SolutionDocument::from_solution(&g, &solution, &q, config_echo);
    println!("{}", serde_json::to_string_pretty(&doc).expect("document serializes"));
    ExitCode::SUCCESS
}

fn solver_name(s: SolverArg) -> &'static str {
    match s {
        SolverArg::Maxgf => "maxgf",
        SolverArg::Exact => "exact",
        SolverArg::Dks => "dks",
    }
}

fn cmd_predict(args: PredictArgs) -> ExitCode {
    let g = match load_graph(&args.graph) {
        Ok(g) => g,
        Err(code) => return code,
    };
    let method = match Method::from_token(&args.method) {
        Ok(m) => m,
        Err(e) => return usage(e),
    };
    let mode = match (args.top_k, args.threshold) {
        (Some(k), None) => SelectionMode::TopK(k),
        (None, Some(t)) => SelectionMode::Threshold(t),
        _ => return usage("exactly one of --top-k or --threshold is required"),
    };
    let pairs = score_pairs(&g, method);
    let augmented = match select_edges(&g, &pairs, &SelectionPolicy { mode }) {
        Ok(g) => g,
        Err(e) => return usage(e),
    };
    if let Err(e) = std::fs::write(&args.output, augmented.to_text()) {
        return usage(format_args!("cannot write {}: {e}", args.output.display()));
    }
    ExitCode::SUCCESS
}

fn cmd_generate(args: GenerateArgs) -> ExitCode {
    if !(0.0..=1.0).contains(&args.friend_prob) || !(0.0..=1.0).contains(&args.potential_prob) {
        return usage("probabilities must lie in [0,1]");
    }
    let g = gen_random(&GenSpec {
        n: args.n,
        friend_prob: args.friend_prob,
        potential_prob: args.potential_prob,
        seed: args.seed,
    });
    if let Err(e) = std::fs::write(&args.output, g.to_text()) {
        return usage(format_args!("cannot write {}: {e}", args.output.display()));
    }
    ExitCode::SUCCESS
}

fn cmd_evaluate(args: EvaluateArgs) -> ExitCode {
    let text = match std::fs::read_to_string(&args.config) {
        Ok(t) => t,
        Err(e) => return usage(format_args!("cannot read {}: {e}", args.config.display())),
    };
    let cfg = match SweepConfig::parse(&text) {
        Ok(c) => c,
        Err(e) => return usage(e),
    };
    let out_dir = match args.out_dir.or_else(|| cfg.out_dir.clone()) {
        Some(d) => d,
        None => return usage("no output directory: set out_dir in the config or pass --out-dir"),
    };
    let report = match run_experiment(&cfg) {
        Ok(r) => r,
        Err(e @ EvalError::Io(_)) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_RESOURCE);
        }
        Err(e) => return usage(e),
    };
    match report.write_outputs(&cfg, &out_dir) {
        Ok(()) => {
            eprintln!(
                "wrote {} rows, {} aggregates to {}",
                report.rows.len(),
                report.aggregates.len(),
                out_dir.display()
            );
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_RESOURCE)
        }
    }
}
