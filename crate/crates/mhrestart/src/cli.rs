//! Batch command-line surface: `solve`, `experiment`, `tmin`, `check`.
//!
//! Runs are described by a flat `key = value` configuration file plus flag
//! overrides (flags win). Unknown configuration keys are rejected by name so
//! typos cannot silently fall back to defaults. Progress goes to stderr;
//! stdout carries machine-readable results only.

use crate::algo::{replication_seed, spawn_replication, ObjectiveValue, Problem, Resumable};
use crate::harness::{
    compare, curve_csv, estimate_failure_curve, log_grid, table_csv, CurveEstimate, Mode,
    SyntheticBasinProblem,
};
use crate::mmas::{BitstringProblem, LocalSearchKind, MmasConfig, TspProblem};
use crate::restart::{run_rp, LambdaSchedule, RestartConfig, StopRule};
use crate::theory::g_value;
use crate::tsplib;
use clap::{Args, Parser, Subcommand};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use thiserror::Error;

/// Environment variable naming the default output directory for experiment
/// CSV files.
pub const OUT_DIR_ENV: &str = "MHRESTART_OUT";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Parser)]
#[command(name = "mhrestart", about = "Adaptive restart experiments for stochastic optimizers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the solver once and report the best value found.
    Solve(RunArgs),
    /// Estimate failure-probability curves and write CSV files.
    Experiment(RunArgs),
    /// Compute the optimal restart time from a failure-curve CSV.
    Tmin {
        /// CSV file with `t` and `p` (or `p_hat`) columns.
        curve: PathBuf,
    },
    /// Parse and validate a TSPLIB instance.
    Check {
        /// TSPLIB file to inspect.
        instance: PathBuf,
    },
}

#[derive(Args, Default, Clone)]
struct RunArgs {
    /// Configuration file (`key = value` lines, `#` comments).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Named parameter preset; `paper` selects r0=20, T0=100, c1=1.2,
    /// c2=1.1, lambda=0.8.
    #[arg(long)]
    preset: Option<String>,
    /// Problem: a TSPLIB path, `bitstring:N`, or `basin:beta,q[,warmup]`.
    #[arg(long)]
    problem: Option<String>,
    /// Mode(s): `plain`, `rp`, `fixed:T`; comma-separated for experiments.
    #[arg(long)]
    mode: Option<String>,
    /// Outer replications for failure-probability estimation.
    #[arg(long)]
    m: Option<u32>,
    /// Pseudo-time budget per run.
    #[arg(long)]
    budget: Option<u64>,
    /// Master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory for CSV files.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (0 = one per core); results are identical for any
    /// count.
    #[arg(long)]
    workers: Option<usize>,
    /// Known-optimum registry file.
    #[arg(long)]
    registry: Option<PathBuf>,
    /// Target optimum: `auto`, `none`, or a number.
    #[arg(long)]
    target: Option<String>,
    #[arg(long)]
    r0: Option<u32>,
    #[arg(long)]
    t0: Option<u32>,
    #[arg(long)]
    c1: Option<f64>,
    #[arg(long)]
    c2: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    /// Per-iteration lambda increment (enables the lambda schedule).
    #[arg(long)]
    lambda_delta: Option<f64>,
    /// Cap for the lambda schedule.
    #[arg(long)]
    lambda_max: Option<f64>,
    #[arg(long)]
    ants: Option<u32>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    rho: Option<f64>,
    /// Candidate-list size for construction and local search.
    #[arg(long)]
    candidates: Option<usize>,
    /// Local search: none, 2opt, 2.5opt, 3opt.
    #[arg(long)]
    local_search: Option<String>,
    /// Best-so-far deposit period (0 = iteration-best only).
    #[arg(long)]
    deposit_period: Option<u32>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProblemSpec {
    Tsp(PathBuf),
    Bitstring(usize),
    Basin { beta: f64, q: f64, warmup: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TargetSpec {
    Auto,
    None,
    Value(f64),
}

/// Fully resolved run description: defaults, then config file, then flags.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub problem: ProblemSpec,
    pub modes: Vec<Mode>,
    pub m: u32,
    pub budget: u64,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub workers: usize,
    pub registry: Option<PathBuf>,
    pub target: TargetSpec,
    pub restart: RestartConfig,
    pub mmas: MmasConfig,
}

const CONFIG_KEYS: &[&str] = &[
    "problem",
    "mode",
    "m",
    "budget",
    "seed",
    "out",
    "workers",
    "registry",
    "target",
    "r0",
    "t0",
    "c1",
    "c2",
    "lambda",
    "lambda_delta",
    "lambda_max",
    "ants",
    "alpha",
    "beta",
    "rho",
    "candidates",
    "local_search",
    "deposit_period",
];

/// Parses a `key = value` configuration file, rejecting unknown keys by name
/// and line.
pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut map = BTreeMap::new();
    for (idx, raw_line) in text.lines().enumerate() {
        let line = raw_line.split('#').next().unwrap_or_default().trim();
        if line.is_empty() {
            continue;
        }
        let line_no = idx + 1;
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::Config(format!("line {line_no}: expected `key = value`, found `{line}`"))
        })?;
        let key = key.trim();
        let value = value.trim();
        if !CONFIG_KEYS.contains(&key) {
            return Err(CliError::Config(format!(
                "line {line_no}: unknown key `{key}`"
            )));
        }
        if map.insert(key.to_string(), value.to_string()).is_some() {
            return Err(CliError::Config(format!(
                "line {line_no}: duplicate key `{key}`"
            )));
        }
    }
    Ok(map)
}

fn parse_problem(text: &str) -> Result<ProblemSpec, CliError> {
    if let Some(rest) = text.strip_prefix("bitstring:") {
        let n: usize = rest
            .parse()
            .map_err(|_| CliError::Config(format!("problem: bad bitstring length `{rest}`")))?;
        if n < 1 {
            return Err(CliError::Config("problem: bitstring length must be >= 1".into()));
        }
        return Ok(ProblemSpec::Bitstring(n));
    }
    if let Some(rest) = text.strip_prefix("basin:") {
        let parts: Vec<&str> = rest.split(',').collect();
        if parts.len() < 2 || parts.len() > 3 {
            return Err(CliError::Config(format!(
                "problem: expected basin:beta,q[,warmup], found `{text}`"
            )));
        }
        let num = |s: &str| -> Result<f64, CliError> {
            s.trim()
                .parse()
                .map_err(|_| CliError::Config(format!("problem: bad basin parameter `{s}`")))
        };
        let beta = num(parts[0])?;
        let q = num(parts[1])?;
        let warmup = if parts.len() == 3 {
            parts[2].trim().parse().map_err(|_| {
                CliError::Config(format!("problem: bad basin warmup `{}`", parts[2]))
            })?
        } else {
            1u32
        };
        if !(beta > 0.0 && beta < 1.0 && q > 0.0 && q <= 1.0 && warmup >= 1) {
            return Err(CliError::Config(
                "problem: basin needs beta in (0,1), q in (0,1], warmup >= 1".into(),
            ));
        }
        return Ok(ProblemSpec::Basin { beta, q, warmup });
    }
    Ok(ProblemSpec::Tsp(PathBuf::from(text)))
}

fn parse_local_search(text: &str) -> Result<LocalSearchKind, CliError> {
    match text {
        "none" => Ok(LocalSearchKind::None),
        "2opt" => Ok(LocalSearchKind::TwoOpt),
        "2.5opt" => Ok(LocalSearchKind::TwoHalfOpt),
        "3opt" => Ok(LocalSearchKind::ThreeOpt),
        other => Err(CliError::Config(format!(
            "local_search: expected none|2opt|2.5opt|3opt, found `{other}`"
        ))),
    }
}

fn parse_target(text: &str) -> Result<TargetSpec, CliError> {
    match text {
        "auto" => Ok(TargetSpec::Auto),
        "none" => Ok(TargetSpec::None),
        number => number
            .parse::<f64>()
            .map(TargetSpec::Value)
            .map_err(|_| CliError::Config(format!("target: expected auto|none|number, found `{number}`"))),
    }
}

fn parse_modes(text: &str, restart: &RestartConfig) -> Result<Vec<Mode>, CliError> {
    text.split(',')
        .map(|part| {
            let part = part.trim();
            if part == "plain" {
                Ok(Mode::Plain)
            } else if part == "rp" {
                Ok(Mode::Rp(restart.clone()))
            } else if let Some(t) = part.strip_prefix("fixed:") {
                let period: u32 = t.parse().map_err(|_| {
                    CliError::Config(format!("mode: bad fixed restart period `{t}`"))
                })?;
                if period < 1 {
                    return Err(CliError::Config("mode: fixed period must be >= 1".into()));
                }
                Ok(Mode::FixedRestart(period))
            } else {
                Err(CliError::Config(format!(
                    "mode: expected plain|rp|fixed:T, found `{part}`"
                )))
            }
        })
        .collect()
}

impl RunConfig {
    /// Resolves a run description: defaults, then the configuration file,
    /// then command-line flags.
    fn resolve(args: &RunArgs) -> Result<RunConfig, CliError> {
        if let Some(preset) = &args.preset {
            if preset != "paper" {
                return Err(CliError::Config(format!("unknown preset `{preset}`")));
            }
            // the `paper` preset is the standard parameter set, which is
            // also the default; accepting it keeps run scripts explicit
        }
        let file: BTreeMap<String, String> = match &args.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(io_err(path))?;
                parse_config_text(&text)?
            }
            None => BTreeMap::new(),
        };
        let lookup = |key: &str| file.get(key).map(String::as_str);
        fn parsed<T: std::str::FromStr>(
            key: &str,
            text: Option<&str>,
        ) -> Result<Option<T>, CliError> {
            match text {
                Some(t) => t.parse::<T>().map(Some).map_err(|_| {
                    CliError::Config(format!("{key}: cannot parse value `{t}`"))
                }),
                None => Ok(None),
            }
        }

        let problem_text = args
            .problem
            .clone()
            .or_else(|| lookup("problem").map(String::from))
            .ok_or_else(|| CliError::Config("missing required key `problem`".into()))?;
        let problem = parse_problem(&problem_text)?;

        let mut restart = RestartConfig::standard(StopRule::budget(1));
        if let Some(v) = args.r0.or(parsed("r0", lookup("r0"))?) {
            restart.initial_replications = v;
        }
        if let Some(v) = args.t0.or(parsed("t0", lookup("t0"))?) {
            restart.initial_horizon = v;
        }
        if let Some(v) = args.c1.or(parsed("c1", lookup("c1"))?) {
            restart.replication_growth = v;
        }
        if let Some(v) = args.c2.or(parsed("c2", lookup("c2"))?) {
            restart.horizon_growth = v;
        }
        if let Some(v) = args.lambda.or(parsed("lambda", lookup("lambda"))?) {
            restart.lambda = v;
        }
        let delta = args
            .lambda_delta
            .or(parsed("lambda_delta", lookup("lambda_delta"))?);
        let max = args.lambda_max.or(parsed("lambda_max", lookup("lambda_max"))?);
        restart.lambda_schedule = match (delta, max) {
            (None, None) => None,
            (Some(delta), Some(max)) => Some(LambdaSchedule { delta, max }),
            (Some(delta), None) => Some(LambdaSchedule { delta, max: 0.99 }),
            (None, Some(_)) => {
                return Err(CliError::Config(
                    "lambda_max given without lambda_delta".into(),
                ))
            }
        };

        let mut mmas = match &problem {
            ProblemSpec::Bitstring(_) => MmasConfig::bitstring_default(),
            _ => MmasConfig::tsp_default(),
        };
        if let Some(v) = args.ants.or(parsed("ants", lookup("ants"))?) {
            mmas.ants = v;
        }
        if let Some(v) = args.alpha.or(parsed("alpha", lookup("alpha"))?) {
            mmas.alpha = v;
        }
        if let Some(v) = args.beta.or(parsed("beta", lookup("beta"))?) {
            mmas.beta = v;
        }
        if let Some(v) = args.rho.or(parsed("rho", lookup("rho"))?) {
            mmas.rho = v;
        }
        if let Some(v) = args.candidates.or(parsed("candidates", lookup("candidates"))?) {
            mmas.candidate_list = v;
        }
        if let Some(text) = args
            .local_search
            .clone()
            .or_else(|| lookup("local_search").map(String::from))
        {
            mmas.local_search = parse_local_search(&text)?;
        }
        if let Some(v) = args
            .deposit_period
            .or(parsed("deposit_period", lookup("deposit_period"))?)
        {
            mmas.best_so_far_period = v;
        }

        let budget = args
            .budget
            .or(parsed("budget", lookup("budget"))?)
            .unwrap_or(100_000);
        restart.stop = StopRule::budget(budget);
        restart
            .validate()
            .map_err(|e| CliError::Config(e.to_string()))?;

        let mode_text = args
            .mode
            .clone()
            .or_else(|| lookup("mode").map(String::from))
            .unwrap_or_else(|| "plain,rp".into());
        let modes = parse_modes(&mode_text, &restart)?;

        let out_dir = args
            .out
            .clone()
            .or_else(|| lookup("out").map(PathBuf::from))
            .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("."));

        let target = match args
            .target
            .clone()
            .or_else(|| lookup("target").map(String::from))
        {
            Some(text) => parse_target(&text)?,
            None => TargetSpec::Auto,
        };

        Ok(RunConfig {
            problem,
            modes,
            m: args.m.or(parsed("m", lookup("m"))?).unwrap_or(100),
            budget,
            seed: args.seed.or(parsed("seed", lookup("seed"))?).unwrap_or(1),
            out_dir,
            workers: args.workers.or(parsed("workers", lookup("workers"))?).unwrap_or(0),
            registry: args
                .registry
                .clone()
                .or_else(|| lookup("registry").map(PathBuf::from)),
            target,
            restart,
            mmas,
        })
    }
}

/// Entry point used by the binary; takes raw process arguments.
pub fn run<I>(args: I) -> Result<(), CliError>
where
    I: IntoIterator<Item = String>,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e)
            if matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            ) =>
        {
            print!("{e}");
            return Ok(());
        }
        Err(e) => return Err(CliError::Usage(e.to_string())),
    };
    match cli.command {
        Command::Check { instance } => cmd_check(&instance),
        Command::Tmin { curve } => cmd_tmin(&curve),
        Command::Solve(args) => cmd_solve(&RunConfig::resolve(&args)?),
        Command::Experiment(args) => cmd_experiment(&RunConfig::resolve(&args)?),
    }
}

fn cmd_check(path: &Path) -> Result<(), CliError> {
    let instance = tsplib::parse_file(path).map_err(io_err(path))?;
    println!("{} {}", instance.metric.name(), instance.dimension);
    Ok(())
}

/// Loads a `t,p` (or experiment `curve.csv`) file and prints the first
/// minimizer of g over the listed points.
fn cmd_tmin(path: &Path) -> Result<(), CliError> {
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| CliError::Config(format!("{}: empty curve file", path.display())))?;
    let columns: Vec<&str> = header.split(',').map(str::trim).collect();
    let t_col = columns
        .iter()
        .position(|&c| c == "t")
        .ok_or_else(|| CliError::Config(format!("{}: no `t` column", path.display())))?;
    let p_col = columns
        .iter()
        .position(|&c| c == "p" || c == "p_hat")
        .ok_or_else(|| CliError::Config(format!("{}: no `p` or `p_hat` column", path.display())))?;
    let mode_col = columns.iter().position(|&c| c == "mode");

    let mut seen_mode: Option<String> = None;
    let mut best: Option<(u32, f64)> = None;
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let line_no = idx + 1;
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if let Some(mc) = mode_col {
            let mode = fields.get(mc).copied().unwrap_or_default();
            match &seen_mode {
                None => seen_mode = Some(mode.to_string()),
                Some(first) if first != mode => {
                    return Err(CliError::Config(format!(
                        "line {line_no}: curve file mixes modes `{first}` and `{mode}`; filter to one"
                    )));
                }
                _ => {}
            }
        }
        let parse_field = |col: usize, what: &str| -> Result<f64, CliError> {
            fields
                .get(col)
                .and_then(|f| f.parse::<f64>().ok())
                .ok_or_else(|| CliError::Config(format!("line {line_no}: bad {what} value")))
        };
        let t = parse_field(t_col, "t")? as u32;
        let p = parse_field(p_col, "p")?;
        if t < 1 || !(0.0..=1.0).contains(&p) {
            return Err(CliError::Config(format!(
                "line {line_no}: t must be >= 1 and p in [0,1]"
            )));
        }
        let g = g_value(p, t);
        if g.is_finite() && best.is_none_or(|(_, gb)| g < gb) {
            best = Some((t, g));
        }
    }
    let (t_m, g_m) =
        best.ok_or_else(|| CliError::Config("g is infinite at every listed point".into()))?;
    println!("t_m {t_m}");
    println!("g {g_m}");
    Ok(())
}

/// The optimum to measure failure against, resolved per problem kind.
fn resolve_target(config: &RunConfig) -> Result<Option<ObjectiveValue>, CliError> {
    match config.target {
        TargetSpec::None => Ok(None),
        TargetSpec::Value(v) => Ok(Some(ObjectiveValue::new(v))),
        TargetSpec::Auto => match &config.problem {
            ProblemSpec::Bitstring(n) => Ok(Some(crate::mmas::bitstring_optimum(*n))),
            ProblemSpec::Basin { .. } => Ok(Some(ObjectiveValue::new(0.0))),
            ProblemSpec::Tsp(path) => {
                let registry_path = config.registry.as_ref().ok_or_else(|| {
                    CliError::Config(
                        "TSP target resolution needs --registry (or `target = none`)".into(),
                    )
                })?;
                let registry =
                    tsplib::registry_from_file(registry_path).map_err(io_err(registry_path))?;
                let instance = tsplib::parse_file(path).map_err(io_err(path))?;
                match registry.get(&instance.name) {
                    Some(&opt) => Ok(Some(ObjectiveValue::new(opt as f64))),
                    None => Err(CliError::Config(format!(
                        "registry {} has no entry for instance `{}`",
                        registry_path.display(),
                        instance.name
                    ))),
                }
            }
        },
    }
}

fn problem_label(config: &RunConfig) -> String {
    match &config.problem {
        ProblemSpec::Tsp(path) => path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string()),
        ProblemSpec::Bitstring(n) => format!("bitstring{n}"),
        ProblemSpec::Basin { beta, q, warmup } => format!("basin:{beta},{q},{warmup}"),
    }
}

fn with_worker_pool<T: Send>(
    workers: usize,
    body: impl FnOnce() -> T + Send,
) -> Result<T, CliError> {
    if workers == 0 {
        Ok(body())
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| CliError::Config(format!("cannot build worker pool: {e}")))?;
        Ok(pool.install(body))
    }
}

fn cmd_solve(config: &RunConfig) -> Result<(), CliError> {
    let target = resolve_target(config)?;
    let mode = config.modes.first().cloned().unwrap_or(Mode::Plain);
    eprintln!(
        "solving {} in mode {} (budget {})",
        problem_label(config),
        mode.label(),
        config.budget
    );
    let best = match &config.problem {
        ProblemSpec::Tsp(path) => {
            let instance = tsplib::parse_file(path).map_err(io_err(path))?;
            solve_one(&TspProblem::new(instance, config.mmas), config, &mode, target)?
        }
        ProblemSpec::Bitstring(n) => {
            solve_one(&BitstringProblem::new(*n, config.mmas), config, &mode, target)?
        }
        ProblemSpec::Basin { beta, q, warmup } => solve_one(
            &SyntheticBasinProblem::new(*beta, *q, *warmup),
            config,
            &mode,
            target,
        )?,
    };
    println!("best {best}");
    match target {
        Some(t) => println!("optimum_reached {}", if best <= t { "yes" } else { "no" }),
        None => println!("optimum_reached unknown"),
    }
    Ok(())
}

fn solve_one<P: Problem>(
    problem: &P,
    config: &RunConfig,
    mode: &Mode,
    target: Option<ObjectiveValue>,
) -> Result<ObjectiveValue, CliError> {
    let seed = config.seed;
    let budget = config.budget;
    match mode {
        Mode::Rp(rp) => {
            let rp = RestartConfig {
                stop: StopRule {
                    pseudo_time_budget: budget,
                    target,
                },
                ..rp.clone()
            };
            Ok(run_rp(problem, &rp, seed).best())
        }
        Mode::Plain => {
            let mut algo = spawn_replication(problem, seed, 1);
            let mut best: Option<ObjectiveValue> = None;
            for _ in 0..budget {
                let v = algo.step();
                let new_best = best.map_or(v, |b| b.min(v));
                best = Some(new_best);
                if target.is_some_and(|t| new_best <= t) {
                    break;
                }
            }
            Ok(best.expect("budget >= 1"))
        }
        Mode::FixedRestart(period) => {
            let mut algo = crate::harness::FixedRestartAlgo::new(problem, *period, seed);
            let mut best: Option<ObjectiveValue> = None;
            for _ in 0..budget {
                let v = algo.step();
                let new_best = best.map_or(v, |b| b.min(v));
                best = Some(new_best);
                if target.is_some_and(|t| new_best <= t) {
                    break;
                }
            }
            Ok(best.expect("budget >= 1"))
        }
    }
}

fn cmd_experiment(config: &RunConfig) -> Result<(), CliError> {
    let target = resolve_target(config)?;
    match &config.problem {
        ProblemSpec::Tsp(path) => {
            let instance = tsplib::parse_file(path).map_err(io_err(path))?;
            experiment_on(&TspProblem::new(instance, config.mmas), config, target)
        }
        ProblemSpec::Bitstring(n) => {
            experiment_on(&BitstringProblem::new(*n, config.mmas), config, target)
        }
        ProblemSpec::Basin { beta, q, warmup } => experiment_on(
            &SyntheticBasinProblem::new(*beta, *q, *warmup),
            config,
            target,
        ),
    }
}

fn experiment_on<P: Problem>(
    problem: &P,
    config: &RunConfig,
    target: Option<ObjectiveValue>,
) -> Result<(), CliError> {
    let label = problem_label(config);
    eprintln!(
        "estimating failure curves for {label}: m={}, budget={}, modes={}",
        config.m,
        config.budget,
        config
            .modes
            .iter()
            .map(Mode::label)
            .collect::<Vec<_>>()
            .join(",")
    );
    let estimates: Vec<CurveEstimate> = with_worker_pool(config.workers, || {
        config
            .modes
            .iter()
            .map(|mode| {
                estimate_failure_curve(problem, mode, config.m, config.budget, target, config.seed)
            })
            .collect::<Result<Vec<_>, _>>()
    })?
    .map_err(|e| CliError::Config(e.to_string()))?;

    std::fs::create_dir_all(&config.out_dir).map_err(io_err(&config.out_dir))?;
    let grid = log_grid(config.budget, 200);
    let curve_path = config.out_dir.join("curve.csv");
    std::fs::write(&curve_path, curve_csv(&estimates, &grid)).map_err(io_err(&curve_path))?;

    let rows = compare(&label, &estimates);
    let table = table_csv(&rows);
    let table_path = config.out_dir.join("table.csv");
    std::fs::write(&table_path, &table).map_err(io_err(&table_path))?;

    // the trace records the restart procedure's inner state for the first
    // outer replication
    if let Some(Mode::Rp(rp)) = config
        .modes
        .iter()
        .find(|m| matches!(m, Mode::Rp(_)))
    {
        let rp = RestartConfig {
            stop: StopRule {
                pseudo_time_budget: config.budget,
                target,
            },
            ..rp.clone()
        };
        let run = run_rp(problem, &rp, replication_seed(config.seed, 1));
        let trace_path = config.out_dir.join("trace.csv");
        std::fs::write(&trace_path, run.trace_csv()).map_err(io_err(&trace_path))?;
    }

    eprintln!("wrote {}", config.out_dir.display());
    print!("{table}");
    Ok(())
}
