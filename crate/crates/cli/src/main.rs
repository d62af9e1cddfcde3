mod commands;
mod settings;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use coxasep::report::Format;

use crate::settings::{KeyError, Settings};

#[derive(Parser, Debug)]
#[command(name = "coxasep", version, about = "Exact checks and Monte Carlo for multi-species ASEP(q, m)")]
struct Cli {
    /// Base seed for all random streams.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Flat `key = value` file; command-line flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = OutFormat::Csv)]
    format: OutFormat,
    /// Worker threads for trajectory fan-out.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OutFormat {
    Csv,
    Json,
}

/// Run parameters; each flag mirrors a config key.
#[derive(Args, Debug, Default)]
struct Params {
    #[arg(long)]
    ctype: Option<String>,
    #[arg(long)]
    rank: Option<String>,
    #[arg(long)]
    q: Option<String>,
    /// Site capacities (comma-separated; a single value for `hydro`).
    #[arg(long, allow_hyphen_values = true)]
    m: Option<String>,
    /// Species block sizes (comma-separated).
    #[arg(long)]
    blocks: Option<String>,
    /// none, case1 or case2.
    #[arg(long)]
    boundary: Option<String>,
    #[arg(long)]
    t: Option<String>,
    #[arg(long)]
    trajectories: Option<String>,
    /// Window half-width (`hydro`, `secondclass`) or site count (`duality`).
    #[arg(long)]
    window: Option<String>,
    #[arg(long)]
    bins: Option<String>,
    /// Comma-separated sites.
    #[arg(long, allow_hyphen_values = true)]
    thresholds: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact verification suites.
    Verify {
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        #[command(flatten)]
        params: Params,
    },
    /// Raw trajectories of the boundary process from the identity coset.
    Simulate {
        #[command(flatten)]
        params: Params,
    },
    /// Density profile of step initial data against m·d(y).
    Hydro {
        #[command(flatten)]
        params: Params,
    },
    /// Second-class particle counts against the shifted-step density.
    Secondclass {
        #[command(flatten)]
        params: Params,
    },
    /// Duality between the height function and a single walker.
    Duality {
        #[command(flatten)]
        params: Params,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Coxeter,
    Diagrams,
    Colpos,
    Stationarity,
    All,
}

impl Params {
    fn into_settings(self) -> Result<Settings, KeyError> {
        let mut s = Settings::default();
        let fields = [
            ("ctype", self.ctype),
            ("rank", self.rank),
            ("q", self.q),
            ("m", self.m),
            ("blocks", self.blocks),
            ("boundary", self.boundary),
            ("t", self.t),
            ("trajectories", self.trajectories),
            ("window", self.window),
            ("bins", self.bins),
            ("thresholds", self.thresholds),
        ];
        for (key, value) in fields {
            if let Some(v) = value {
                s.set(key, &v)?;
            }
        }
        Ok(s)
    }
}

enum Failure {
    /// Bad input: exit 2.
    Usage(String),
    /// Checks ran but did not all pass: exit 1.
    Checks(String),
}

impl From<KeyError> for Failure {
    fn from(e: KeyError) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<coxasep::error::Error> for Failure {
    fn from(e: coxasep::error::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn load(cli_seed: Option<u64>, config: Option<&PathBuf>, params: Params) -> Result<Settings, Failure> {
    let file = match config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Usage(format!("cannot read config file {}: {e}", path.display())))?;
            Settings::parse(&text)?
        }
        None => Settings::default(),
    };
    let mut s = file.overlay(params.into_settings()?);
    if cli_seed.is_some() {
        s.seed = cli_seed;
    }
    Ok(s)
}

fn run(cli: Cli) -> Result<(), Failure> {
    if let Some(k) = cli.jobs {
        if k == 0 {
            return Err(Failure::Usage("--jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .map_err(|e| Failure::Usage(format!("cannot start {k} workers: {e}")))?;
    }
    let format = match cli.format {
        OutFormat::Csv => Format::Csv,
        OutFormat::Json => Format::Json,
    };
    let config = cli.config.as_ref();
    let output = match cli.command {
        Command::Verify { suite, params } => commands::verify(&load(cli.seed, config, params)?, suite, format)?,
        Command::Simulate { params } => commands::simulate(&load(cli.seed, config, params)?, format)?,
        Command::Hydro { params } => commands::hydro(&load(cli.seed, config, params)?, format)?,
        Command::Secondclass { params } => commands::secondclass(&load(cli.seed, config, params)?, format)?,
        Command::Duality { params } => commands::duality(&load(cli.seed, config, params)?, format)?,
    };
    match &cli.out {
        Some(path) => std::fs::write(path, &output.text)
            .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{}", output.text),
    }
    match output.failed {
        Some(msg) => Err(Failure::Checks(msg)),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Checks(msg)) => {
            eprintln!("checks failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
