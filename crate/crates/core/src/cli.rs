//! Command-line front end: `validate`, `rollout`, `analyze`, `benchmark` and
//! `serve`.
//!
//! Exit codes: 0 success, 1 validation or usage error, 2 runtime error.
//! Multi-episode commands use seeds `seed, seed + 1, ...`.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::net::TcpListener;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::config::{
    self, default_config, load_config_file, parse_grid_point, timestep_warnings,
    validate_reward_landscape, ConfigError, EnvConfig,
};
use crate::policies::{PolicyKind, DEFAULT_THRESHOLD};
use crate::protocol;
use crate::rollout::{
    self, consecutive_seeds, ecdf, emptying_events, export_trace, format_number, import_trace,
    summarize, EventFilter, Summary, TraceMeta, Trajectory,
};

#[derive(Debug, Parser)]
#[command(
    name = "container-sim",
    version,
    about = "Container filling and PU allocation simulator"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Load a config, check its invariants and scan its reward landscape.
    Validate(ValidateArgs),
    /// Run a built-in policy and write per-episode CSV traces plus a summary.
    Rollout(RolloutArgs),
    /// Turn exported traces into ECDF tables or plot data.
    Analyze(AnalyzeArgs),
    /// Compare the built-in policies on grid configs.
    Benchmark(BenchmarkArgs),
    /// Serve the JSON-lines environment protocol.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// Config JSON file.
    pub config: PathBuf,
    /// Grid spacing of the reward landscape scan, in volume units.
    #[arg(long, default_value_t = 0.01)]
    pub grid_step: f64,
}

#[derive(Debug, Args)]
pub struct RolloutArgs {
    /// Config JSON file.
    #[arg(long)]
    pub config: PathBuf,
    /// rule-based, random or do-nothing.
    #[arg(long, default_value = "rule-based")]
    pub policy: PolicyKind,
    /// Rule-based emptying distance to the ideal volume.
    #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
    pub threshold: f64,
    /// Number of episodes.
    #[arg(long, default_value_t = 15)]
    pub episodes: usize,
    /// Seed of the first episode.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Override the config's episode horizon.
    #[arg(long)]
    pub horizon: Option<usize>,
    /// Worker threads; results do not depend on this.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Output directory.
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AnalyzeMode {
    /// ECDF of the volumes of successful emptyings.
    EcdfVolumes,
    /// ECDF of the reward of every emptying attempt.
    EcdfRewards,
    /// Volumes, emptying actions and non-zero rewards per step.
    TracePlotData,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Directory holding `episode-<seed>.csv` traces.
    #[arg(long)]
    pub traces: PathBuf,
    #[arg(long, value_enum)]
    pub mode: AnalyzeMode,
    /// One ECDF table per container instead of a pooled one.
    #[arg(long)]
    pub per_container: bool,
    /// Output directory.
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct BenchmarkArgs {
    /// Grid point `n,m,delta`; repeatable. Defaults to the eight standard points.
    #[arg(long = "grid")]
    pub grid: Vec<String>,
    #[arg(long, default_value_t = 15)]
    pub episodes: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Evaluation horizon.
    #[arg(long, default_value_t = 600)]
    pub horizon: usize,
    #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
    pub threshold: f64,
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Also write `benchmark.csv` here.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Transport {
    Stdio,
    Tcp,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long, value_enum, default_value_t = Transport::Stdio)]
    pub transport: Transport,
    /// TCP port; 0 picks a free one.
    #[arg(long, default_value_t = 7878)]
    pub port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    pub host: String,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Runtime(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Runtime(m) => m,
        }
    }
}

impl From<io::Error> for CliError {
    fn from(err: io::Error) -> Self {
        CliError::Runtime(err.to_string())
    }
}

impl From<ConfigError> for CliError {
    fn from(err: ConfigError) -> Self {
        match err {
            ConfigError::Io(e) => CliError::Runtime(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

type CliResult = Result<(), CliError>;

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    0
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    1
                }
            };
        }
    };
    let result = match cli.command {
        Command::Validate(a) => validate(&a, out, err),
        Command::Rollout(a) => rollout(&a, out),
        Command::Analyze(a) => analyze(&a, out, err),
        Command::Benchmark(a) => benchmark(&a, out),
        Command::Serve(a) => serve(&a, err),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message());
            e.exit_code()
        }
    }
}

fn validate(args: &ValidateArgs, out: &mut dyn Write, err: &mut dyn Write) -> CliResult {
    if !(args.grid_step > 0.0 && args.grid_step.is_finite()) {
        return Err(CliError::Usage("--grid-step must be positive".into()));
    }
    let cfg = load_config_file(&args.config)?;
    let mut warnings = validate_reward_landscape(&cfg, args.grid_step);
    warnings.extend(timestep_warnings(&cfg));
    for w in &warnings {
        writeln!(err, "warning: {w}")?;
    }
    writeln!(
        out,
        "ok: {} (n={}, m={}, delta={}, T={}, fingerprint {}), {} warning(s)",
        args.config.display(),
        cfg.container_count(),
        cfg.pu_count,
        cfg.timestep_seconds,
        cfg.max_episode_steps,
        cfg.fingerprint(),
        warnings.len()
    )?;
    Ok(())
}

fn check_jobs(jobs: usize) -> CliResult {
    if jobs == 0 {
        return Err(CliError::Usage("--jobs must be at least 1".into()));
    }
    Ok(())
}

#[derive(Serialize)]
struct SummaryFile<'a> {
    policy: String,
    config_fingerprint: String,
    seeds: &'a [u64],
    mean_cumulative_reward: f64,
    std_cumulative_reward: f64,
    overflows: usize,
    mean_emptying_fraction: f64,
}

pub fn trace_file_name(seed: u64) -> String {
    format!("episode-{seed}.csv")
}

fn rollout(args: &RolloutArgs, out: &mut dyn Write) -> CliResult {
    check_jobs(args.jobs)?;
    if args.episodes == 0 {
        return Err(CliError::Usage("--episodes must be at least 1".into()));
    }
    let policy = args
        .policy
        .with_threshold(args.threshold)
        .map_err(CliError::Usage)?;
    let mut cfg = load_config_file(&args.config)?;
    if let Some(h) = args.horizon {
        if h == 0 {
            return Err(CliError::Usage("--horizon must be at least 1".into()));
        }
        cfg = cfg.with_max_episode_steps(h);
    }
    let seeds = consecutive_seeds(args.seed, args.episodes);
    let trajs = rollout::run_episodes(&cfg, policy, &seeds, args.jobs)
        .map_err(|e| CliError::Runtime(e.to_string()))?;

    fs::create_dir_all(&args.out_dir)?;
    for traj in &trajs {
        export_trace(traj, args.out_dir.join(trace_file_name(traj.seed)))
            .map_err(|e| CliError::Runtime(e.to_string()))?;
    }
    let summary = summarize(&trajs).map_err(|e| CliError::Runtime(e.to_string()))?;
    write_summary(&args.out_dir, &summary)?;
    let file = SummaryFile {
        policy: policy.name().into(),
        config_fingerprint: cfg.fingerprint(),
        seeds: &seeds,
        mean_cumulative_reward: summary.mean,
        std_cumulative_reward: summary.std,
        overflows: summary.overflow_count(),
        mean_emptying_fraction: summary.mean_emptying_fraction(),
    };
    let json = serde_json::to_string_pretty(&file).map_err(io::Error::other)?;
    fs::write(args.out_dir.join("summary.json"), json + "\n")?;
    fs::write(
        args.out_dir.join("config.json"),
        cfg.to_json_pretty() + "\n",
    )?;

    writeln!(
        out,
        "{}: {} episode(s), cumulative reward {:.4} ± {:.4}, {} overflow(s), emptying fraction {:.4}",
        policy,
        trajs.len(),
        summary.mean,
        summary.std,
        summary.overflow_count(),
        summary.mean_emptying_fraction()
    )?;
    Ok(())
}

fn write_summary(dir: &Path, summary: &Summary) -> CliResult {
    let mut text = String::from("seed,cumulative_reward,steps,overflow,emptying_fraction\n");
    for e in &summary.episodes {
        text.push_str(&format!(
            "{},{},{},{},{}\n",
            e.seed,
            format_number(e.cumulative_reward),
            e.steps,
            e.overflow,
            format_number(e.emptying_fraction)
        ));
    }
    fs::write(dir.join("summary.csv"), text)?;
    Ok(())
}

/// Loads every `episode-<seed>.csv` in `dir`, ordered by seed.
pub fn load_traces(dir: &Path) -> Result<Vec<Trajectory>, CliError> {
    let entries = fs::read_dir(dir)
        .map_err(|e| CliError::Runtime(format!("cannot read {}: {e}", dir.display())))?;
    let mut found: Vec<(u64, PathBuf)> = Vec::new();
    for entry in entries {
        let path = entry?.path();
        let seed = path
            .file_name()
            .and_then(|n| n.to_str())
            .and_then(|n| n.strip_prefix("episode-"))
            .and_then(|n| n.strip_suffix(".csv"))
            .and_then(|s| s.parse::<u64>().ok());
        if let Some(seed) = seed {
            found.push((seed, path));
        }
    }
    if found.is_empty() {
        return Err(CliError::Runtime(format!(
            "no episode-<seed>.csv traces in {}",
            dir.display()
        )));
    }
    found.sort();
    found
        .into_iter()
        .map(|(seed, path)| {
            let meta = TraceMeta {
                seed,
                config_fingerprint: String::new(),
            };
            import_trace(&path, meta)
                .map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))
        })
        .collect()
}

fn write_ecdf_table(path: &Path, samples: &[f64]) -> CliResult {
    let mut text = String::from("value,fraction\n");
    if !samples.is_empty() {
        let f = ecdf(samples).map_err(|e| CliError::Runtime(e.to_string()))?;
        for (v, p) in f.points() {
            text.push_str(&format!("{},{}\n", format_number(v), format_number(p)));
        }
    }
    fs::write(path, text)?;
    Ok(())
}

fn analyze(args: &AnalyzeArgs, out: &mut dyn Write, err: &mut dyn Write) -> CliResult {
    let trajs = load_traces(&args.traces)?;
    fs::create_dir_all(&args.out_dir)?;
    let (stem, filter, value): (&str, EventFilter, fn(&rollout::EmptyingEvent) -> f64) =
        match args.mode {
            AnalyzeMode::TracePlotData => return plot_data(&trajs, &args.out_dir, out),
            AnalyzeMode::EcdfVolumes => (
                "ecdf-volumes",
                EventFilter {
                    container: None,
                    successful_only: true,
                },
                |e| e.volume,
            ),
            AnalyzeMode::EcdfRewards => ("ecdf-rewards", EventFilter::default(), |e| e.reward),
        };

    let n = trajs
        .iter()
        .map(Trajectory::container_count)
        .max()
        .unwrap_or(0);
    let groups: Vec<(String, Option<usize>)> = if args.per_container {
        (0..n)
            .map(|i| (format!("{stem}-c{}.csv", i + 1), Some(i)))
            .collect()
    } else {
        vec![(format!("{stem}.csv"), None)]
    };
    for (file, container) in groups {
        let events = emptying_events(
            &trajs,
            EventFilter {
                container,
                ..filter
            },
        );
        let samples: Vec<f64> = events.iter().map(value).collect();
        if samples.is_empty() {
            writeln!(err, "warning: {file}: no emptying events, table is empty")?;
        }
        write_ecdf_table(&args.out_dir.join(&file), &samples)?;
        let extra = if args.mode == AnalyzeMode::EcdfRewards && !samples.is_empty() {
            let f = ecdf(&samples).map_err(|e| CliError::Runtime(e.to_string()))?;
            format!(", share in [0.75, 1] = {:.4}", f.mass_between(0.75, 1.0))
        } else {
            String::new()
        };
        writeln!(out, "{file}: {} sample(s){extra}", samples.len())?;
    }
    Ok(())
}

fn plot_data(trajs: &[Trajectory], dir: &Path, out: &mut dyn Write) -> CliResult {
    for traj in trajs {
        let n = traj.container_count();
        let mut volumes = String::from("t");
        for i in 1..=n {
            volumes.push_str(&format!(",v_{i}"));
        }
        volumes.push('\n');
        let mut actions = String::from("t,container,volume\n");
        let mut rewards = String::from("t,reward\n");
        for rec in &traj.records {
            volumes.push_str(&rec.t.to_string());
            for &v in &rec.volumes {
                volumes.push(',');
                volumes.push_str(&format_number(v));
            }
            volumes.push('\n');
            if let crate::env::Action::Empty(i) = rec.action {
                actions.push_str(&format!(
                    "{},{},{}\n",
                    rec.t,
                    i + 1,
                    format_number(rec.volumes[i])
                ));
            }
            if rec.reward != 0.0 {
                rewards.push_str(&format!("{},{}\n", rec.t, format_number(rec.reward)));
            }
        }
        let stem = format!("plot-{}", traj.seed);
        fs::write(dir.join(format!("{stem}-volumes.csv")), volumes)?;
        fs::write(dir.join(format!("{stem}-actions.csv")), actions)?;
        fs::write(dir.join(format!("{stem}-rewards.csv")), rewards)?;
    }
    writeln!(out, "wrote plot data for {} trace(s)", trajs.len())?;
    Ok(())
}

/// Grid points of the standard benchmark table.
pub const STANDARD_GRID: [(usize, usize, f64); 8] = [
    (5, 2, 60.0),
    (5, 2, 120.0),
    (5, 5, 60.0),
    (5, 5, 120.0),
    (11, 2, 60.0),
    (11, 2, 120.0),
    (11, 11, 60.0),
    (11, 11, 120.0),
];

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkRow {
    pub grid_point: (usize, usize, f64),
    /// `(policy, summary)` in rule-based, random, do-nothing order.
    pub results: Vec<(PolicyKind, Summary)>,
}

/// Runs the three built-in policies on each grid point.
pub fn run_benchmark(
    grid: &[(usize, usize, f64)],
    episodes: usize,
    first_seed: u64,
    horizon: usize,
    threshold: f64,
    jobs: usize,
) -> Result<Vec<BenchmarkRow>, CliError> {
    let policies = [
        PolicyKind::RuleBased { threshold },
        PolicyKind::UniformRandom,
        PolicyKind::DoNothing,
    ];
    let seeds = consecutive_seeds(first_seed, episodes);
    grid.iter()
        .map(|&(n, m, delta)| {
            let cfg: EnvConfig = default_config(n, m, delta)?.with_max_episode_steps(horizon);
            let results = policies
                .iter()
                .map(|&p| {
                    let trajs = rollout::run_episodes(&cfg, p, &seeds, jobs)
                        .map_err(|e| CliError::Runtime(e.to_string()))?;
                    let summary =
                        summarize(&trajs).map_err(|e| CliError::Runtime(e.to_string()))?;
                    Ok((p, summary))
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            Ok(BenchmarkRow {
                grid_point: (n, m, delta),
                results,
            })
        })
        .collect()
}

fn benchmark(args: &BenchmarkArgs, out: &mut dyn Write) -> CliResult {
    check_jobs(args.jobs)?;
    if args.episodes == 0 || args.horizon == 0 {
        return Err(CliError::Usage(
            "--episodes and --horizon must be at least 1".into(),
        ));
    }
    if !(args.threshold > 0.0 && args.threshold.is_finite()) {
        return Err(CliError::Usage("--threshold must be positive".into()));
    }
    let grid = if args.grid.is_empty() {
        STANDARD_GRID.to_vec()
    } else {
        args.grid
            .iter()
            .map(|g| parse_grid_point(g).map_err(CliError::Usage))
            .collect::<Result<Vec<_>, _>>()?
    };
    let rows = run_benchmark(
        &grid,
        args.episodes,
        args.seed,
        args.horizon,
        args.threshold,
        args.jobs,
    )?;

    writeln!(
        out,
        "{:>4} {:>4} {:>6} | {:>18} | {:>18} | {:>18}",
        "n", "m", "delta", "rule-based", "random", "do-nothing"
    )?;
    let mut csv = String::from("n,m,delta,policy,mean,std,overflows,emptying_fraction\n");
    for row in &rows {
        let (n, m, delta) = row.grid_point;
        let cells: Vec<String> = row
            .results
            .iter()
            .map(|(_, s)| format!("{:.2} ± {:.2}", s.mean, s.std))
            .collect();
        writeln!(
            out,
            "{n:>4} {m:>4} {delta:>6} | {:>18} | {:>18} | {:>18}",
            cells[0], cells[1], cells[2]
        )?;
        for (p, s) in &row.results {
            csv.push_str(&format!(
                "{n},{m},{delta},{p},{},{},{},{}\n",
                format_number(s.mean),
                format_number(s.std),
                s.overflow_count(),
                format_number(s.mean_emptying_fraction())
            ));
        }
    }
    if let Some(dir) = &args.out_dir {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("benchmark.csv"), csv)?;
    }
    Ok(())
}

fn serve(args: &ServeArgs, err: &mut dyn Write) -> CliResult {
    let cfg = load_config_file(&args.config)?;
    match args.transport {
        Transport::Stdio => protocol::serve_stdio(cfg)?,
        Transport::Tcp => {
            let listener = TcpListener::bind((args.host.as_str(), args.port))?;
            writeln!(err, "listening on {}", listener.local_addr()?)?;
            err.flush()?;
            protocol::serve_tcp(cfg, listener)?;
        }
    }
    Ok(())
}

/// Writes every shipped grid config into `dir`.
pub fn write_shipped_configs(dir: &Path) -> io::Result<()> {
    fs::create_dir_all(dir)?;
    for (n, m, delta) in config::grid_points() {
        let cfg = default_config(n, m, delta).expect("grid point");
        fs::write(
            dir.join(config::shipped_config_name(n, m, delta)),
            cfg.to_json_pretty() + "\n",
        )?;
    }
    Ok(())
}
