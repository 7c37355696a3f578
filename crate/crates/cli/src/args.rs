use std::net::SocketAddr;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use volga_swarm::{ChurnSpec, SpeedSpec};

#[derive(Debug, Parser)]
#[command(name = "volga", version, about = "Volunteer island-model GA: clearinghouse server, synthetic swarm and log analysis")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the clearinghouse server and its experiment watcher.
    Serve(ServeArgs),
    /// Run a synthetic swarm of clients against a server.
    Swarm(SwarmArgs),
    /// Compute gap, generation, duration and series tables from a log.
    Analyze(AnalyzeArgs),
    /// Write a swarm plan file.
    GenPlan(GenPlanArgs),
    /// Write or check the canonical protocol vectors.
    Vectors(VectorsArgs),
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    /// JSON config file: the /api/config schema plus an optional "server" section.
    #[arg(long, short)]
    pub config: Option<PathBuf>,
    /// Address to listen on, overriding the config file.
    #[arg(long)]
    pub listen: Option<SocketAddr>,
    /// Directory for the state snapshot and logs.
    #[arg(long)]
    pub data_dir: Option<PathBuf>,
    /// Event log path (default: DATA_DIR/events.jsonl).
    #[arg(long)]
    pub event_log: Option<PathBuf>,
    /// Directory of client assets served at /.
    #[arg(long)]
    pub static_dir: Option<PathBuf>,
    /// Evaluation budget for new experiments.
    #[arg(long)]
    pub budget: Option<u64>,
    /// Watcher period in milliseconds.
    #[arg(long)]
    pub watcher_period_ms: Option<u64>,
    /// Run the server clock this many times faster than wall time.
    #[arg(long)]
    pub clock_scale: Option<f64>,
    /// Print the effective configuration and exit.
    #[arg(long)]
    pub print_config: bool,
}

/// Swarm shape when no plan file is given.
#[derive(Debug, Args)]
pub struct PlanSpecArgs {
    /// Number of volunteers.
    #[arg(long, default_value_t = 4)]
    pub clients: usize,
    /// Speed distribution: constant:F, lognormal:MEDIAN,SIGMA or pareto:SCALE,SHAPE.
    #[arg(long, default_value = "lognormal:1,0.5", value_parser = parse_speed)]
    pub speed: SpeedSpec,
    /// Churn: none or geometric:MEAN_SEGMENTS,REJOIN_PROBABILITY,JOIN_SPREAD.
    #[arg(long, default_value = "none", value_parser = parse_churn)]
    pub churn: ChurnSpec,
    /// Seconds of simulated compute per segment at speed 1; 0 runs flat out.
    #[arg(long, default_value_t = volga_swarm::DEFAULT_BASE_SEGMENT_DELAY)]
    pub base_delay: f64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct SwarmArgs {
    /// Server root URL.
    #[arg(long, default_value = "http://127.0.0.1:8080")]
    pub server: String,
    /// Plan file written by gen-plan; overrides the inline spec.
    #[arg(long)]
    pub plan: Option<PathBuf>,
    #[command(flatten)]
    pub spec: PlanSpecArgs,
    /// Write the report JSON here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Retries per request before a client gives up.
    #[arg(long, default_value_t = 4)]
    pub max_retries: u32,
}

#[derive(Debug, Args)]
pub struct GenPlanArgs {
    #[command(flatten)]
    pub spec: PlanSpecArgs,
    /// Write the plan here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LogFormat {
    /// The server's event log.
    Jsonl,
    /// Apache combined access log.
    Apache,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Table {
    Gaps,
    Generations,
    Durations,
    Series,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Log file to read.
    #[arg(long)]
    pub log: PathBuf,
    #[arg(long, value_enum, default_value_t = LogFormat::Jsonl)]
    pub format: LogFormat,
    /// Directory for the CSV tables.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Tables to write (default: all).
    #[arg(long, value_enum, value_delimiter = ',')]
    pub only: Vec<Table>,
    /// Single-machine estimate for speedups: seconds per segment and segments per experiment.
    #[arg(long, num_args = 2, value_names = ["AVG_SEGMENT_SECONDS", "SEGMENTS"])]
    pub speedup: Option<Vec<f64>>,
    /// Bin width of the generations histogram.
    #[arg(long, default_value_t = 20)]
    pub bin_width: u64,
    /// Request path of migrations in an Apache log.
    #[arg(long, default_value = "/api/migration")]
    pub migration_path: String,
    /// Print the headline JSON only; write no tables.
    #[arg(long)]
    pub summary: bool,
}

#[derive(Debug, Args)]
pub struct VectorsArgs {
    /// Directory to write to or check.
    #[arg(long, default_value = "vectors")]
    pub out: PathBuf,
    /// Compare existing files instead of writing; exit 1 on any difference.
    #[arg(long)]
    pub check: bool,
}

fn numbers(s: &str, n: usize) -> Result<Vec<f64>, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|e| format!("{x:?}: {e}")))
        .collect::<Result<_, _>>()?;
    if v.len() != n {
        return Err(format!("expected {n} comma-separated numbers, got {}", v.len()));
    }
    Ok(v)
}

pub fn parse_speed(s: &str) -> Result<SpeedSpec, String> {
    let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
    match kind {
        "constant" => Ok(SpeedSpec::Constant { factor: numbers(rest, 1)?[0] }),
        "lognormal" => {
            let v = numbers(rest, 2)?;
            Ok(SpeedSpec::LogNormal { median: v[0], sigma: v[1] })
        }
        "pareto" => {
            let v = numbers(rest, 2)?;
            Ok(SpeedSpec::Pareto { scale: v[0], shape: v[1] })
        }
        _ => Err(format!("unknown speed distribution {kind:?}; use constant, lognormal or pareto")),
    }
}

pub fn parse_churn(s: &str) -> Result<ChurnSpec, String> {
    let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
    match kind {
        "none" if rest.is_empty() => Ok(ChurnSpec::None),
        "geometric" => {
            let v = numbers(rest, 3)?;
            Ok(ChurnSpec::Geometric {
                mean_segments: v[0],
                rejoin_probability: v[1],
                join_spread: v[2],
            })
        }
        _ => Err(format!("unknown churn model {s:?}; use none or geometric:MEAN,REJOIN,SPREAD")),
    }
}
