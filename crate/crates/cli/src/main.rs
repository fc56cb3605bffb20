use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use pressure_lab::Error;

mod commands;
mod config;
mod output;

use config::RunConfig;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    /// A self-check ran to completion but found violated contracts.
    #[error("{0} checks failed")]
    Checks(usize),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Core(e) => match e {
                Error::CapExceeded { .. } => 3,
                Error::Contract(_) | Error::NoConvergence(_) => 4,
                Error::Io(_) => 1,
                _ => 2,
            },
            CliError::Checks(_) => 4,
            CliError::Io(_) | CliError::Json(_) | CliError::Csv(_) => 1,
        }
    }

    fn kind(&self) -> &'static str {
        match self.exit_code() {
            2 => "config",
            3 => "cap_exceeded",
            4 => "contract_violation",
            _ => "io",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Route {
    Transfer,
    Brute,
    Separated,
    All,
}

#[derive(Parser, Debug)]
#[command(name = "pressure-lab", version, about = "Topological pressure and damped quantum cat maps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML run configuration. Defaults apply when absent.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Pressure route.
    #[arg(long, global = true, value_enum, default_value = "all")]
    route: Route,
    /// Comma-separated list of dimensions, replacing `quantum.dims`.
    #[arg(long = "N", global = true, value_delimiter = ',')]
    dims: Option<Vec<usize>>,
    /// Word enumeration cap, replacing `symbolic.cap`.
    #[arg(long, global = true)]
    cap: Option<u64>,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Pressure of the symbolic system by transfer matrix, brute force and separated sets.
    Pressure,
    /// Parry measure entropy and its Shannon–McMillan–Breiman estimate.
    Entropy,
    /// Window-family sums against the counting bound.
    CountingLemma,
    /// Damped spectrum for each dimension.
    Spectrum,
    /// Spectral gap `γ_min` and `γ_min log N` per dimension.
    GapScan,
    /// Masses of slow modes on `W` and on its window family.
    MassScan,
    /// Quantum functional of slow modes on all words of the scan length.
    Functional,
    /// Interleaved norms against the hyperbolic dispersive bound.
    DispersiveCheck,
    /// Subinvariance slack and the rewriting identity on slow modes.
    Subinvariance,
    /// Exact-identity suite on small dimensions.
    Selftest,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Pressure => "pressure",
            Command::Entropy => "entropy",
            Command::CountingLemma => "counting-lemma",
            Command::Spectrum => "spectrum",
            Command::GapScan => "gap-scan",
            Command::MassScan => "mass-scan",
            Command::Functional => "functional",
            Command::DispersiveCheck => "dispersive-check",
            Command::Subinvariance => "subinvariance",
            Command::Selftest => "selftest",
        }
    }
}

fn load(cli: &Cli) -> Result<(RunConfig, PathBuf), CliError> {
    let (mut cfg, base) = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => (RunConfig::parse("")?, PathBuf::from(".")),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(o) = &cli.out {
        cfg.out = o.clone();
    }
    if let Some(d) = &cli.dims {
        cfg.quantum.dims = d.clone();
    }
    if let Some(c) = cli.cap {
        cfg.symbolic.cap = c;
    }
    cfg.validate()?;
    Ok((cfg, base))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let name = cli.command.name();
    let (cfg, base) = match load(&cli) {
        Ok(c) => c,
        Err(e) => return report(name, None, &e),
    };
    let stamp = output::Stamp { config_hash: cfg.hash(), seed: cfg.seed, version: output::VERSION, command: name.to_owned() };
    let mut sink = match output::Sink::new(&cfg.out, stamp.clone()) {
        Ok(s) => s,
        Err(e) => return report(name, Some(&stamp), &e),
    };
    let ctx = commands::Context { cfg: &cfg, base: &base, route: cli.route };
    match commands::run(cli.command, &ctx, &mut sink) {
        Ok(()) => {
            for p in sink.written() {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            if let CliError::Checks(_) = e {
                for p in sink.written() {
                    println!("{}", p.display());
                }
            }
            report(name, Some(&stamp), &e)
        }
    }
}

/// Machine-readable failure report on stderr.
fn report(command: &str, stamp: Option<&output::Stamp>, e: &CliError) -> ExitCode {
    let code = e.exit_code();
    let body = serde_json::json!({
        "command": command,
        "error": e.kind(),
        "exitCode": code,
        "message": e.to_string(),
        "configHash": stamp.map(|s| s.config_hash.clone()),
        "version": output::VERSION,
    });
    eprintln!("{body}");
    ExitCode::from(code)
}
