use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use mgtp_core::bench::{bench_cells, bfs_oracle, run_cell, validate_plan, write_csv, Method};
use mgtp_core::domains::{generate_bearing, BearingScenario, StochasticPresent};
use mgtp_core::parser::{load_domain, load_problem};
use mgtp_core::search::{Planner, SearchConfig, SearchError, SearchStats};
use mgtp_core::Task;

const EXIT_BUDGET: u8 = 2;

#[derive(Parser)]
#[command(
    name = "mgtp",
    version,
    about = "Multi-goal task planner (MCTS with prioritized node expansion)"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Search for a plan and print it, one action per line.
    Plan(PlanArgs),
    /// Run the bearing benchmark grid and write a CSV table.
    Bench(BenchArgs),
    /// Write a bearing-inspection domain and problem.
    Generate(GenerateArgs),
    /// Check a plan file against a domain and problem.
    Validate(ValidateArgs),
    /// Shortest plan by breadth-first search (small instances only).
    Oracle(OracleArgs),
}

#[derive(Args)]
struct TaskFiles {
    #[arg(long)]
    domain: PathBuf,
    #[arg(long)]
    problem: PathBuf,
}

#[derive(Args)]
struct PlanArgs {
    #[command(flatten)]
    files: TaskFiles,
    /// Bridging factor; ignored unless the method uses PNE.
    #[arg(long, default_value_t = 5)]
    beta: usize,
    #[arg(long, default_value_t = std::f64::consts::SQRT_2)]
    c: f64,
    #[arg(long, default_value_t = 3.0)]
    kappa: f64,
    #[arg(long, default_value_t = 1.0)]
    reward: f64,
    #[arg(long, default_value_t = 30_000)]
    max_nodes: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "uct+ar+pne")]
    method: Method,
    /// Stop expanding a node after its first sub-goal child.
    #[arg(long)]
    early_exit: bool,
    /// Failure probability of present actions.
    #[arg(long, default_value_t = 0.0)]
    stochastic: f64,
}

#[derive(Args)]
struct BenchArgs {
    /// Range `lo..hi` (inclusive) or comma-separated list.
    #[arg(long, default_value = "1..9")]
    bearings: String,
    #[arg(long, value_delimiter = ',', default_value = "2,5")]
    beta: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "uct,uct+ar,uct+ar+pne")]
    methods: Vec<Method>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 30_000)]
    max_nodes: usize,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    bearings: usize,
    #[arg(long, default_value_t = 0.0)]
    stochastic: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ValidateArgs {
    #[command(flatten)]
    files: TaskFiles,
    #[arg(long)]
    plan: PathBuf,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    files: TaskFiles,
    /// Maximum number of distinct states to visit.
    #[arg(long, default_value_t = 1_000_000)]
    cap: usize,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::FAILURE
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Plan(args) => plan(args),
        Command::Bench(args) => bench(args),
        Command::Generate(args) => generate(args),
        Command::Validate(args) => validate(args),
        Command::Oracle(args) => oracle(args),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn load_task(files: &TaskFiles) -> Result<Task> {
    let domain = load_domain(&files.domain)?;
    let problem = load_problem(&files.problem, &domain)?;
    Task::ground(&domain, &problem).with_context(|| format!("grounding {}", files.problem.display()))
}

fn print_stats(out: &mut impl Write, stats: &SearchStats) -> std::io::Result<()> {
    writeln!(out, "; D (expanded nodes): {}", stats.expanded_nodes)?;
    writeln!(out, "; A (distinct actions): {}", stats.distinct_actions)?;
    writeln!(out, "; I (infeasible actions): {}", stats.infeasible_actions)?;
    writeln!(out, "; oracle calls: {}", stats.oracle_calls)?;
    writeln!(out, "; iterations: {}", stats.iterations)?;
    writeln!(out, "; T_L (search s): {:.6}", stats.search_time.as_secs_f64())?;
    writeln!(out, "; T_A (oracle s): {:.6}", stats.oracle_time.as_secs_f64())
}

fn plan(args: PlanArgs) -> Result<ExitCode> {
    let task = load_task(&args.files)?;
    let base = SearchConfig {
        c: args.c,
        kappa: args.kappa,
        beta: args.beta,
        reward: args.reward,
        max_nodes: args.max_nodes,
        seed: args.seed,
        early_exit: args.early_exit,
    };
    let (config, reducer) = args.method.configure(&base, args.beta, &task);
    let mut planner = Planner::new(&task, config).with_reducer(reducer);
    if args.stochastic > 0.0 {
        planner = planner.with_simulator(StochasticPresent::new(args.stochastic, args.seed)?);
    }
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match planner.run() {
        Ok(outcome) => {
            for (action, changed) in outcome.steps_with_effect() {
                let key = &task.action(action).key;
                if changed {
                    writeln!(out, "{key}")?;
                } else {
                    writeln!(out, "; failed: {key}")?;
                }
            }
            writeln!(out, "; L (plan length): {}", outcome.effective_plan().len())?;
            print_stats(&mut out, &outcome.stats)?;
            Ok(ExitCode::SUCCESS)
        }
        Err(e @ (SearchError::BudgetExhausted(_) | SearchError::SearchExhausted(_))) => {
            writeln!(out, "; no plan: {e}")?;
            print_stats(&mut out, e.stats().expect("carries stats"))?;
            Ok(ExitCode::from(EXIT_BUDGET))
        }
        Err(e) => Err(e.into()),
    }
}

fn parse_bearings(spec: &str) -> Result<Vec<usize>> {
    let values: Vec<usize> = if let Some((lo, hi)) = spec.split_once("..") {
        let lo: usize = lo
            .trim()
            .parse()
            .with_context(|| format!("bad range start in `{spec}`"))?;
        let hi: usize = hi
            .trim()
            .parse()
            .with_context(|| format!("bad range end in `{spec}`"))?;
        (lo..=hi).collect()
    } else {
        spec.split(',')
            .map(|s| s.trim().parse().with_context(|| format!("bad bearing count `{s}`")))
            .collect::<Result<_>>()?
    };
    if values.is_empty() || values.contains(&0) {
        bail!("bearing counts must be at least 1 (got `{spec}`)");
    }
    Ok(values)
}

fn bench(args: BenchArgs) -> Result<ExitCode> {
    let bearings = parse_bearings(&args.bearings)?;
    let base = SearchConfig {
        seed: args.seed,
        max_nodes: args.max_nodes,
        ..SearchConfig::default()
    };
    let cells = bench_cells(&bearings, &args.beta, &args.methods);
    let mut records = Vec::with_capacity(cells.len());
    for (b, method, beta) in &cells {
        match run_cell(*b, *method, *beta, &base) {
            Ok(r) => {
                eprintln!(
                    "b={b} {method} beta={beta}: D={} L={} converged={}",
                    r.d,
                    r.l.map_or("-".to_string(), |l| l.to_string()),
                    r.converged
                );
                records.push(r);
            }
            Err(e) => eprintln!("b={b} {method} beta={beta}: skipped: {e}"),
        }
    }
    let file = fs::File::create(&args.out).with_context(|| format!("cannot create {}", args.out.display()))?;
    write_csv(file, &records)?;
    if records.is_empty() && !cells.is_empty() {
        bail!("every benchmark cell failed");
    }
    Ok(ExitCode::SUCCESS)
}

fn generate(args: GenerateArgs) -> Result<ExitCode> {
    let scenario = BearingScenario::stochastic(args.bearings, args.stochastic);
    let (domain, problem) = generate_bearing(&scenario)?;
    fs::create_dir_all(&args.out).with_context(|| format!("cannot create {}", args.out.display()))?;
    write_file(&args.out.join("domain.pddl"), &domain)?;
    write_file(&args.out.join("problem.pddl"), &problem)?;
    println!("N={}", scenario.goal_count());
    Ok(ExitCode::SUCCESS)
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

/// Action keys of a plan file; blank lines and `;` comments are skipped.
fn read_plan(path: &Path) -> Result<Vec<String>> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with(';'))
        .map(String::from)
        .collect())
}

fn validate(args: ValidateArgs) -> Result<ExitCode> {
    let task = load_task(&args.files)?;
    let plan = read_plan(&args.plan)?;
    let verdict = validate_plan(&task, &plan);
    println!("{verdict}");
    Ok(if verdict.is_valid() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn oracle(args: OracleArgs) -> Result<ExitCode> {
    let task = load_task(&args.files)?;
    match bfs_oracle(&task, args.cap) {
        Ok(Some(plan)) => {
            for a in &plan {
                println!("{}", task.action(*a).key);
            }
            println!("; shortest plan length: {}", plan.len());
            Ok(ExitCode::SUCCESS)
        }
        Ok(None) => {
            println!("; no plan exists");
            Ok(ExitCode::from(EXIT_BUDGET))
        }
        Err(e) => {
            println!("; {e}");
            Ok(ExitCode::from(EXIT_BUDGET))
        }
    }
}
