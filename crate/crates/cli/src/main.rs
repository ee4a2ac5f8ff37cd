//! `catchscope`: ingest catchment observations, find routing modes and
//! changes, render reports and score detections against ground truth.

mod analyze;
mod collect;
mod config;
mod ingest;
mod pipeline;
mod report;
mod store;
mod synth;
mod validate;

use std::fmt;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand};

use config::Study;
use store::Store;

/// Bad input or usage; exits with status 2.
#[derive(Debug)]
pub struct InputError(pub String);

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InputError {}

const DEFAULT_CONFIG: &str = "catchscope.toml";

#[derive(Parser)]
#[command(
    name = "catchscope",
    version,
    about = "Catchment routing-vector analysis"
)]
struct Cli {
    /// Study configuration (TOML). Defaults to ./catchscope.toml when present.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Store directory; overrides the config's `store`.
    #[arg(long, global = true)]
    store: Option<PathBuf>,
    /// Seed for synthetic generation.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse configured inputs into the snapshot store.
    Ingest,
    /// Similarity matrix, routing modes and change events.
    Analyze {
        /// Fixed distance threshold instead of the adaptive sweep.
        #[arg(long)]
        threshold: Option<f64>,
    },
    /// Heatmap, stack plot, transition tables and flow exports.
    Report,
    /// Score detected changes against a ground-truth log.
    Validate {
        #[arg(long)]
        ground_truth: Option<PathBuf>,
        /// Count detections that match no event as false positives.
        #[arg(long)]
        strict: bool,
    },
    /// Generate a synthetic study from a scenario file.
    Synth {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// EDNS client-subnet lookups for a list of prefixes.
    Collect {
        #[arg(long)]
        hostname: String,
        /// Resolver address, e.g. 192.0.2.53:53.
        #[arg(long)]
        resolver: SocketAddr,
        /// File with one prefix per line.
        #[arg(long)]
        prefixes: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Snapshot time (epoch seconds); defaults to now.
        #[arg(long)]
        time: Option<i64>,
        #[arg(long, default_value_t = 2000)]
        timeout_ms: u64,
        #[arg(long, default_value_t = catchscope::ingest::DEFAULT_CONCURRENCY)]
        concurrency: usize,
        /// Rules mapping CNAME answers to sites.
        #[arg(long)]
        rules: Option<PathBuf>,
    },
}

fn load_study(cli: &Cli) -> anyhow::Result<Study> {
    match &cli.config {
        Some(path) => Study::load(path),
        None if Path::new(DEFAULT_CONFIG).exists() => Study::load(Path::new(DEFAULT_CONFIG)),
        None => Study::parse("version = 1\n"),
    }
}

fn open_store(cli: &Cli, study: &Study) -> Store {
    match (&cli.store, &study.store) {
        (Some(dir), _) => Store::new(dir),
        (None, Some(dir)) => Store::new(study.resolve(dir)),
        (None, None) => Store::new(study.resolve(Path::new("store"))),
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match &cli.command {
        Command::Synth { scenario, out } => synth::run(scenario, out, cli.seed),
        Command::Collect {
            hostname,
            resolver,
            prefixes,
            out,
            time,
            timeout_ms,
            concurrency,
            rules,
        } => collect::run(&collect::CollectArgs {
            hostname,
            resolver: *resolver,
            prefixes,
            out,
            time: *time,
            timeout: Duration::from_millis(*timeout_ms),
            concurrency: *concurrency,
            rules: rules.as_deref(),
        }),
        command => {
            let study = load_study(&cli)?;
            let store = open_store(&cli, &study);
            match command {
                Command::Ingest => ingest::run(&study, &store),
                Command::Analyze { threshold } => analyze::run(&study, &store, *threshold),
                Command::Report => report::run(&study, &store),
                Command::Validate {
                    ground_truth,
                    strict,
                } => validate::run(&study, &store, ground_truth.clone(), *strict).map(|_| ()),
                Command::Synth { .. } | Command::Collect { .. } => unreachable!(),
            }
        }
    }
}

/// 2 for anything the user can fix by changing inputs, 1 otherwise.
fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<InputError>() {
            return 2;
        }
        if let Some(e) = cause.downcast_ref::<catchscope::Error>() {
            return match e {
                catchscope::Error::Io(io) if io.kind() != std::io::ErrorKind::NotFound => 1,
                _ => 2,
            };
        }
        if let Some(io) = cause.downcast_ref::<std::io::Error>() {
            if io.kind() == std::io::ErrorKind::NotFound {
                return 2;
            }
        }
    }
    1
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
