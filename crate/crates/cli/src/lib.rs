//! Command-line front end: solving, brute force, generation, benchmarking
//! and verification over the JSON instance and solution formats.

mod bench;
mod verify;

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use colorful_kcenter::colorful::{solve_colorful, SolveOptions};
use colorful_kcenter::error::Error;
use colorful_kcenter::fair::{solve_fair, FairOptions};
use colorful_kcenter::generators::{
    fixture_appendix_b, gen_from_setcover, gen_from_vc3, gen_random, gen_random_fair, Graph, MetricKind, RandomSpec,
    SetCoverInstance,
};
use colorful_kcenter::io::{fair_instance_to_json, instance_to_json, parse_instance, LoadedInstance, SolutionFile};
use colorful_kcenter::model::{FairInstance, Instance};
use colorful_kcenter::oracle::{brute_force_colorful, brute_force_fair, DEFAULT_CAP};

pub use bench::{BenchReport, BenchRow};
pub use verify::{verify, Verdict};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INFEASIBLE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INVARIANT: i32 = 3;

/// Environment variable capping the bench worker count.
pub const THREADS_ENV: &str = "COLORFUL_KCENTER_THREADS";

#[derive(Debug, Parser)]
#[command(name = "colorful-kcenter", version, about = "Colorful and fair colorful k-center solvers")]
struct Cli {
    /// Write the primary output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Emit logs on stderr as JSON lines (filter with RUST_LOG).
    #[arg(long, global = true)]
    json_logs: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Approximate a colorful instance.
    Solve {
        #[arg(long)]
        instance: PathBuf,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Compute a lottery for a fair instance.
    SolveFair {
        #[arg(long)]
        instance: PathBuf,
        #[command(flatten)]
        search: SearchArgs,
        /// Number of center sets to draw from the lottery.
        #[arg(long, default_value_t = 0)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Exact optimum by enumeration.
    Brute {
        #[arg(long)]
        instance: PathBuf,
        /// Solve the fair variant (requires `p`).
        #[arg(long)]
        fair: bool,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: u128,
    },
    /// Generate an instance.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Emit a built-in fixture.
    #[command(subcommand)]
    Fixture(FixtureCommand),
    /// Compare the solver against the brute-force optimum on random instances.
    Bench(BenchArgs),
    /// Re-check a solution file against an instance.
    Verify {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        solution: PathBuf,
    },
}

#[derive(Debug, Args)]
struct SearchArgs {
    /// Probe candidate radii in increasing order instead of bisecting.
    #[arg(long)]
    linear_scan: bool,
    /// Also write the solver trace to this file.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Enumerate exactly when γ ≥ k and at most this many center sets exist.
    #[arg(long, default_value_t = DEFAULT_CAP)]
    enumeration_cap: u128,
}

#[derive(Debug, Subcommand)]
enum GenCommand {
    /// From an edge-list graph of maximum degree 3.
    Vc3 {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        t: usize,
    },
    /// From a JSON set system `{"universe": n, "sets": [[...], ...]}`.
    Setcover {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        t: usize,
    },
    /// A seeded random instance.
    Random(RandomArgs),
}

#[derive(Debug, Subcommand)]
enum FixtureCommand {
    /// The two-cluster integrality-gap example.
    AppendixB {
        #[arg(long = "M", default_value_t = 100)]
        m: i64,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Metric {
    Line,
    Grid,
}

impl From<Metric> for MetricKind {
    fn from(m: Metric) -> Self {
        match m {
            Metric::Line => MetricKind::Line,
            Metric::Grid => MetricKind::GridL1,
        }
    }
}

#[derive(Debug, Clone, Args)]
struct RandomArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 10)]
    n: usize,
    #[arg(long, default_value_t = 3)]
    k: usize,
    #[arg(long, default_value_t = 2)]
    gamma: usize,
    #[arg(long, value_enum, default_value_t = Metric::Line)]
    metric: Metric,
    #[arg(long, default_value_t = 0.5)]
    color_density: f64,
    #[arg(long, default_value_t = 0.5)]
    demand_density: f64,
    /// Attach coverage requirements `p`.
    #[arg(long)]
    fair: bool,
    #[arg(long, default_value_t = 0.5)]
    p_density: f64,
}

impl RandomArgs {
    fn spec(&self) -> RandomSpec {
        RandomSpec {
            color_density: self.color_density,
            demand_density: self.demand_density,
            p_density: self.p_density,
            ..RandomSpec::new(self.n, self.k, self.gamma, self.metric.into())
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Suite {
    Random,
    Fair,
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[arg(long, value_enum, default_value_t = Suite::Random)]
    suite: Suite,
    /// Inclusive seed range `a..b`, or a single seed.
    #[arg(long, default_value = "1..20", value_parser = parse_seeds)]
    seeds: (u64, u64),
    #[arg(long, default_value_t = 10)]
    n: usize,
    #[arg(long, default_value_t = 3)]
    k: usize,
    #[arg(long, default_value_t = 2)]
    gamma: usize,
    #[arg(long, value_enum, default_value_t = Metric::Line)]
    metric: Metric,
    #[arg(long, default_value_t = 0.5)]
    color_density: f64,
    #[arg(long, default_value_t = 0.5)]
    demand_density: f64,
    #[arg(long, default_value_t = 0.5)]
    p_density: f64,
    /// Skip the oracle when it would enumerate more than this many sets.
    #[arg(long, default_value_t = DEFAULT_CAP)]
    cap: u128,
    /// Print the report as JSON instead of a table.
    #[arg(long)]
    json: bool,
}

fn parse_seeds(s: &str) -> Result<(u64, u64), String> {
    let num = |t: &str| t.trim().parse::<u64>().map_err(|e| format!("bad seed {t:?}: {e}"));
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (num(a)?, num(b.trim_start_matches('='))?),
        None => (num(s)?, num(s)?),
    };
    if a > b {
        return Err(format!("empty seed range {s}"));
    }
    Ok((a, b))
}

/// How a command failed, mapped onto the exit codes.
#[derive(Debug)]
enum Failure {
    Infeasible(String),
    /// A report to emit before exiting with the given code.
    Report(String, i32),
    Usage(String),
    Invariant(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_invariant() {
            Failure::Invariant(e.to_string())
        } else {
            Failure::Usage(e.to_string())
        }
    }
}

type Outcome = Result<String, Failure>;

/// Runs the command line `argv` (including the program name) and returns
/// the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    init_logging(cli.json_logs);
    let result = dispatch(&cli.command).and_then(|text| emit(cli.out.as_deref(), &text));
    match result {
        Ok(()) => EXIT_OK,
        Err(Failure::Report(report, code)) => match emit(cli.out.as_deref(), &report) {
            Ok(()) => code,
            Err(_) => EXIT_USAGE,
        },
        Err(Failure::Infeasible(msg)) => {
            eprintln!("infeasible: {msg}");
            EXIT_INFEASIBLE
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Invariant(msg)) => {
            eprintln!("internal error: {msg}");
            EXIT_INVARIANT
        }
    }
}

fn init_logging(json: bool) {
    let filter = tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "warn".into());
    let builder = tracing_subscriber::fmt().with_env_filter(filter).with_writer(std::io::stderr);
    // A second `run` in the same process keeps the first subscriber.
    let _ = if json { builder.json().try_init() } else { builder.try_init() };
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => write_file(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn read_file(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))
}

fn load(path: &Path) -> Result<LoadedInstance, Failure> {
    Ok(parse_instance(&read_file(path)?)?)
}

fn load_fair(path: &Path) -> Result<FairInstance, Failure> {
    match load(path)? {
        LoadedInstance::Fair(f) => Ok(f),
        LoadedInstance::Colorful(_) => {
            Err(Failure::Usage(format!("{} has no coverage requirements \"p\"", path.display())))
        }
    }
}

fn write_trace(path: Option<&Path>, trace: &Option<serde_json::Value>) -> Result<(), Failure> {
    if let (Some(path), Some(trace)) = (path, trace) {
        let text = serde_json::to_string_pretty(trace).map_err(|e| Failure::Usage(e.to_string()))? + "\n";
        write_file(path, &text)?;
    }
    Ok(())
}

fn dispatch(command: &Command) -> Outcome {
    match command {
        Command::Solve { instance, search } => {
            let inst: Instance = load(instance)?.base().clone();
            let opts = SolveOptions { linear_scan: search.linear_scan, enumeration_cap: search.enumeration_cap };
            let sol = solve_colorful(&inst, &opts)?
                .ok_or_else(|| Failure::Infeasible("no set of k centers meets the demands at any radius".into()))?;
            let file = SolutionFile::from_colorful(&inst, &sol)?;
            write_trace(search.trace.as_deref(), &file.trace)?;
            Ok(file.to_json()?)
        }
        Command::SolveFair { instance, search, samples, seed } => {
            let finst = load_fair(instance)?;
            let opts = FairOptions { linear_scan: search.linear_scan, enumeration_cap: search.enumeration_cap };
            let sol = solve_fair(&finst, &opts)?
                .ok_or_else(|| Failure::Infeasible("no lottery meets the requirements at any radius".into()))?;
            let draws = (*samples > 0).then(|| {
                (0..*samples as u64).map(|i| sol.distribution.sample(seed.wrapping_add(i)).to_vec()).collect()
            });
            let file = SolutionFile::from_fair(&sol, draws)?;
            write_trace(search.trace.as_deref(), &file.trace)?;
            Ok(file.to_json()?)
        }
        Command::Brute { instance, fair, cap } => {
            let loaded = load(instance)?;
            if *fair {
                let finst = load_fair(instance)?;
                let d = brute_force_fair(&finst, *cap)?
                    .ok_or_else(|| Failure::Infeasible("no lottery meets the requirements at any radius".into()))?;
                let file = SolutionFile {
                    radius: d.radius,
                    guess: None,
                    centers: None,
                    coverage: None,
                    distribution: Some(d.support),
                    samples: None,
                    trace: None,
                };
                Ok(file.to_json()?)
            } else {
                let inst = loaded.base();
                let set = brute_force_colorful(inst, *cap)?
                    .ok_or_else(|| Failure::Infeasible("no set of k centers meets the demands at any radius".into()))?;
                Ok(SolutionFile::from_centers(inst, &set).to_json()?)
            }
        }
        Command::Gen(GenCommand::Vc3 { graph, t }) => {
            let g = Graph::parse_edge_list(&read_file(graph)?)?;
            Ok(instance_to_json(&gen_from_vc3(&g, *t)?)?)
        }
        Command::Gen(GenCommand::Setcover { instance, t }) => {
            let sc: SetCoverInstance = serde_json::from_str(&read_file(instance)?).map_err(Error::from)?;
            Ok(instance_to_json(&gen_from_setcover(&sc, *t)?)?)
        }
        Command::Gen(GenCommand::Random(args)) => {
            if args.fair {
                Ok(fair_instance_to_json(&gen_random_fair(args.seed, &args.spec())?)?)
            } else {
                Ok(instance_to_json(&gen_random(args.seed, &args.spec())?)?)
            }
        }
        Command::Fixture(FixtureCommand::AppendixB { m }) => Ok(instance_to_json(&fixture_appendix_b(*m)?.instance)?),
        Command::Bench(args) => bench::run_bench(args),
        Command::Verify { instance, solution } => {
            let loaded = load(instance)?;
            let sol = SolutionFile::parse(&read_file(solution)?)?;
            match verify(&loaded, &sol) {
                Verdict::Ok => Ok("ok\n".into()),
                Verdict::Violations(v) => {
                    Err(Failure::Report(v.iter().map(|line| format!("violation: {line}\n")).collect(), EXIT_INFEASIBLE))
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_ranges_are_inclusive() {
        assert_eq!(parse_seeds("1..50"), Ok((1, 50)));
        assert_eq!(parse_seeds("3..=4"), Ok((3, 4)));
        assert_eq!(parse_seeds("7"), Ok((7, 7)));
        assert!(parse_seeds("4..1").is_err());
        assert!(parse_seeds("a..b").is_err());
    }

    #[test]
    fn invariant_errors_map_to_exit_three() {
        assert!(matches!(Failure::from(Error::Invariant("x".into())), Failure::Invariant(_)));
        assert!(matches!(Failure::from(Error::Parse("x".into())), Failure::Usage(_)));
    }
}
