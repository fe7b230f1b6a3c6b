//! `hnuc`: solve, cross-check, generate and report on set covering
//! cost-allocation instances.
//!
//! Exit codes: 0 success / check passed, 2 invalid file or parameters,
//! 3 infeasible instance, 4 check failed, 5 capacity exceeded.

mod report;

use clap::{Args, Parser, Subcommand, ValueEnum};
use happy_nucleolus::checks::{self, CheckReport};
use happy_nucleolus::families::{self, PairFamily, Provenance};
use happy_nucleolus::generators::{self, vrp, RandomInstanceParams};
use happy_nucleolus::lp::FractionalCoverError;
use happy_nucleolus::model::{Allocation, SetCoverInstance, SimplePair};
use happy_nucleolus::mps::MpsError;
use happy_nucleolus::oracle::{CoalitionTable, OracleError, OracleLimits};
use happy_nucleolus::rational::parse_rational;
use happy_nucleolus::solver::{self, HappySolution, SolveError};
use std::path::{Path, PathBuf};
use std::time::Instant;

const EXIT_OK: i32 = 0;
const EXIT_INVALID: i32 = 2;
const EXIT_INFEASIBLE: i32 = 3;
const EXIT_CHECK_FAILED: i32 = 4;
const EXIT_CAPACITY: i32 = 5;

#[derive(Parser)]
#[command(
    name = "hnuc",
    about = "Exact cost allocation for set covering games",
    version,
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance and print the allocation, total and stage log.
    Solve(SolveArgs),
    /// Run a verification suite against an instance.
    Check(CheckArgs),
    /// Generate an instance file.
    Gen(GenArgs),
    /// Emit a CSV excess table for an instance and an allocation.
    Report(ReportArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// Instance JSON file.
    instance: PathBuf,
    /// Pair family: c-star, c-star-star, or custom:<path>.
    #[arg(long, default_value = "c-star")]
    family: String,
    #[arg(long, value_enum, default_value_t = OutputFormat::Table)]
    format: OutputFormat,
    /// Also write the JSON report to this path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Table,
    Json,
}

#[derive(Args)]
struct CheckArgs {
    /// Instance JSON file.
    instance: PathBuf,
    #[arg(long, value_enum)]
    mode: CheckModeArg,
    /// Seed for sampled pairs (superset mode).
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// How many extra pairs to sample (superset mode).
    #[arg(long, default_value_t = 20)]
    extra: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CheckModeArg {
    /// Solver equals the full-coalition brute force.
    Oracle,
    /// Automorphisms leave the allocation invariant.
    Symmetry,
    /// Extra sampled pairs do not move the result.
    Superset,
    /// Every explicit-family pair is indispensable under adversarial costs.
    Minimality,
}

#[derive(Args)]
struct GenArgs {
    #[command(subcommand)]
    kind: GenKind,
}

#[derive(Subcommand)]
enum GenKind {
    /// Nested sets {p1..pi} of cost i.
    Chain {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Three two-element sets with sorted costs.
    Triangle {
        #[arg(long)]
        c1: String,
        #[arg(long)]
        c2: String,
        #[arg(long)]
        c3: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Expand a vehicle routing spec into tour sets.
    Vrp {
        /// VRP spec JSON file.
        #[arg(long)]
        spec: PathBuf,
        /// Override the spec's distance rounding denominator.
        #[arg(long)]
        round_denom: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Seeded random instance.
    Random {
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 5)]
        players: usize,
        #[arg(long, default_value_t = 8)]
        sets: usize,
        #[arg(long, default_value_t = 10)]
        max_cost: i64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ReportArgs {
    /// Instance JSON file.
    instance: PathBuf,
    /// Allocation JSON file ({"values": [...]} or a solve report).
    allocation: PathBuf,
    /// Restrict rows to a family (c-star or c-star-star) instead of the
    /// full oracle table.
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Failure { code, message: message.into() }
    }
}

type CliResult<T> = Result<T, Failure>;

fn main() {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            failure.code
        }
    };
    std::process::exit(code);
}

fn run(cli: Cli) -> CliResult<i32> {
    match cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Check(args) => cmd_check(args),
        Command::Gen(args) => cmd_gen(args.kind),
        Command::Report(args) => cmd_report(args),
    }
}

fn oracle_limits() -> CliResult<OracleLimits> {
    match std::env::var("HN_MAX_ORACLE_N") {
        Ok(text) => {
            let n: usize = text.parse().map_err(|_| {
                Failure::new(EXIT_INVALID, format!("HN_MAX_ORACLE_N is not a number: `{text}`"))
            })?;
            Ok(OracleLimits::with_table_n(n))
        }
        Err(_) => Ok(OracleLimits::default()),
    }
}

fn read_to_string(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::new(EXIT_INVALID, format!("cannot read {}: {e}", path.display())))
}

fn load_instance(path: &Path) -> CliResult<SetCoverInstance> {
    let text = read_to_string(path)?;
    serde_json::from_str(&text)
        .map_err(|e| Failure::new(EXIT_INVALID, format!("cannot parse {}: {e}", path.display())))
}

fn write_output(path: Option<&Path>, content: &str) -> CliResult<()> {
    match path {
        Some(path) => std::fs::write(path, content).map_err(|e| {
            Failure::new(EXIT_INVALID, format!("cannot write {}: {e}", path.display()))
        }),
        None => {
            println!("{content}");
            Ok(())
        }
    }
}

fn solve_failure(err: SolveError) -> Failure {
    let code = match &err {
        SolveError::Invalid(_) => EXIT_INVALID,
        SolveError::Fractional(FractionalCoverError::Infeasible) => EXIT_INFEASIBLE,
        SolveError::Fractional(FractionalCoverError::Unbounded) => EXIT_INVALID,
        SolveError::Mps(MpsError::InfeasibleRegion) => EXIT_INFEASIBLE,
        _ => 1,
    };
    Failure::new(code, err.to_string())
}

fn cmd_solve(args: SolveArgs) -> CliResult<i32> {
    let inst = load_instance(&args.instance)?;
    let started = Instant::now();
    let solution = solve_with_family(&inst, &args.family)?;
    let elapsed_ms = started.elapsed().as_secs_f64() * 1e3;
    let report = report::solve_report(&solution, elapsed_ms);
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    match args.format {
        OutputFormat::Table => print!("{}", report::render_table(&report)),
        OutputFormat::Json => println!("{json}"),
    }
    if let Some(out) = &args.out {
        std::fs::write(out, &json).map_err(|e| {
            Failure::new(EXIT_INVALID, format!("cannot write {}: {e}", out.display()))
        })?;
    }
    Ok(EXIT_OK)
}

fn solve_with_family(inst: &SetCoverInstance, family_arg: &str) -> CliResult<HappySolution> {
    match family_arg {
        "c-star" => solver::happy_nucleolus(inst).map_err(solve_failure),
        "c-star-star" => {
            let (instance, _) = inst.normalized();
            let family = families::build_c_star_star(&instance, &oracle_limits()?)
                .map_err(family_failure)?;
            solver::lexmax_over_family(&instance, &family, true).map_err(solve_failure)
        }
        custom => match custom.strip_prefix("custom:") {
            Some(path) => {
                let text = read_to_string(Path::new(path))?;
                let pairs: Vec<SimplePair> = serde_json::from_str(&text).map_err(|e| {
                    Failure::new(EXIT_INVALID, format!("cannot parse family {path}: {e}"))
                })?;
                let family = PairFamily::new(pairs, Provenance::Custom)
                    .map_err(|e| Failure::new(EXIT_INVALID, e.to_string()))?;
                solver::lexmax_over_family(inst, &family, false).map_err(solve_failure)
            }
            None => Err(Failure::new(
                EXIT_INVALID,
                format!("unknown family `{family_arg}` (use c-star, c-star-star or custom:<path>)"),
            )),
        },
    }
}

fn family_failure(err: families::FamilyError) -> Failure {
    let code = match &err {
        families::FamilyError::TooLarge { .. } => EXIT_CAPACITY,
        families::FamilyError::Oracle(OracleError::Capacity { .. }) => EXIT_CAPACITY,
        _ => EXIT_INVALID,
    };
    Failure::new(code, err.to_string())
}

fn cmd_check(args: CheckArgs) -> CliResult<i32> {
    let inst = load_instance(&args.instance)?;
    let limits = oracle_limits()?;
    let outcome = match args.mode {
        CheckModeArg::Oracle => checks::check_oracle(&inst, &limits),
        CheckModeArg::Symmetry => checks::check_symmetry(&inst),
        CheckModeArg::Superset => checks::check_superset(&inst, args.extra, args.seed),
        CheckModeArg::Minimality => checks::check_minimality(&inst, &limits),
    };
    let report: CheckReport = match outcome {
        Ok(report) => report,
        Err(err) if err.is_capacity() => {
            return Err(Failure::new(EXIT_CAPACITY, err.to_string()));
        }
        Err(checks::CheckError::Solve(err)) => return Err(solve_failure(err)),
        Err(err) => return Err(Failure::new(EXIT_INVALID, err.to_string())),
    };
    for line in &report.details {
        println!("{line}");
    }
    if report.passed {
        println!("check {}: pass", report.mode.name());
        Ok(EXIT_OK)
    } else {
        println!("check {}: FAIL", report.mode.name());
        Ok(EXIT_CHECK_FAILED)
    }
}

fn cmd_gen(kind: GenKind) -> CliResult<i32> {
    let gen_failure = |e: generators::GeneratorError| Failure::new(EXIT_INVALID, e.to_string());
    let (instance, out) = match kind {
        GenKind::Chain { n, out } => (generators::chain_instance(n).map_err(gen_failure)?, out),
        GenKind::Triangle { c1, c2, c3, out } => {
            let parse =
                |s: &str| parse_rational(s).map_err(|e| Failure::new(EXIT_INVALID, e.to_string()));
            let inst = generators::triangle_instance(parse(&c1)?, parse(&c2)?, parse(&c3)?)
                .map_err(gen_failure)?;
            (inst, out)
        }
        GenKind::Vrp { spec, round_denom, out } => {
            let text = read_to_string(&spec)?;
            let mut vrp_spec: vrp::VrpSpec = serde_json::from_str(&text).map_err(|e| {
                Failure::new(EXIT_INVALID, format!("cannot parse {}: {e}", spec.display()))
            })?;
            if let Some(denom) = round_denom {
                vrp_spec.round_denom = denom;
            }
            let inst = vrp::vrp_to_setcover(&vrp_spec)
                .map_err(|e| Failure::new(EXIT_INVALID, e.to_string()))?;
            eprintln!("generated {} sets over {} customers", inst.sets.len(), inst.n_players());
            (inst, out)
        }
        GenKind::Random { seed, players, sets, max_cost, out } => {
            let params = RandomInstanceParams {
                n_players: players,
                n_sets: sets,
                max_cost,
                ..Default::default()
            };
            (generators::random_instance(&params, seed).map_err(gen_failure)?, out)
        }
    };
    let json = serde_json::to_string_pretty(&instance).expect("instance serializes");
    write_output(out.as_deref(), &json)?;
    Ok(EXIT_OK)
}

fn load_allocation(path: &Path, n_players: usize) -> CliResult<Allocation> {
    let text = read_to_string(path)?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| Failure::new(EXIT_INVALID, format!("cannot parse {}: {e}", path.display())))?;
    // Accept a bare allocation or a full solve report.
    let allocation_value = if value.get("values").is_some() {
        value
    } else if let Some(inner) = value.get("allocation") {
        inner.clone()
    } else {
        return Err(Failure::new(
            EXIT_INVALID,
            format!("{} has neither `values` nor `allocation.values`", path.display()),
        ));
    };
    let allocation: Allocation = serde_json::from_value(allocation_value)
        .map_err(|e| Failure::new(EXIT_INVALID, format!("bad allocation: {e}")))?;
    if allocation.len() != n_players {
        return Err(Failure::new(
            EXIT_INVALID,
            format!("allocation has {} values for {} players", allocation.len(), n_players),
        ));
    }
    Ok(allocation)
}

fn cmd_report(args: ReportArgs) -> CliResult<i32> {
    let inst = load_instance(&args.instance)?;
    let validation = happy_nucleolus::model::validate_instance(&inst);
    if !validation.is_ok() {
        let msgs: Vec<String> = validation.violations.iter().map(|v| v.to_string()).collect();
        return Err(Failure::new(EXIT_INVALID, msgs.join("; ")));
    }
    let (instance, _) = inst.normalized();
    let allocation = load_allocation(&args.allocation, instance.n_players())?;
    let csv = match args.family.as_deref() {
        None => {
            let table = CoalitionTable::build(&instance, &oracle_limits()?).map_err(|e| {
                let code = match &e {
                    OracleError::Capacity { .. } => EXIT_CAPACITY,
                    _ => EXIT_INVALID,
                };
                Failure::new(
                    code,
                    format!("{e}; pass --family c-star for a family-restricted table"),
                )
            })?;
            report::full_excess_csv(&instance, &table, &allocation)
        }
        Some("c-star") => {
            let family = families::build_c_star(&instance).map_err(family_failure)?;
            report::family_excess_csv(&instance, &family.pairs, &allocation)
        }
        Some("c-star-star") => {
            let family = families::build_c_star_star(&instance, &oracle_limits()?)
                .map_err(family_failure)?;
            report::family_excess_csv(&instance, &family.pairs, &allocation)
        }
        Some(other) => {
            return Err(Failure::new(
                EXIT_INVALID,
                format!("unknown family `{other}` (use c-star or c-star-star)"),
            ));
        }
    }
    .map_err(|e| Failure::new(EXIT_INVALID, format!("cannot write CSV: {e}")))?;
    write_output(args.out.as_deref(), csv.trim_end())?;
    Ok(EXIT_OK)
}
