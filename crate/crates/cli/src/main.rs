use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use nbmimo_cli::{execute, parse_raw, CliError, Experiment, RawConfig, SimConfig};

#[derive(Parser, Debug)]
#[command(name = "nbmimo", version, about = "Large MIMO link simulation with non-binary LDPC coding")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Experiment configuration (flat `key = value` lines).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed, overrides `seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads, overrides `workers`.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Output file, overrides `output`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Print the resolved configuration and derived quantities, then exit.
    #[arg(long, global = true)]
    dry_run: bool,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Uncoded BER of a linear detector.
    UncodedBer,
    /// BER/FER of the LDPC coded link.
    CodedBer,
    /// Ergodic capacity.
    Capacity,
    /// Flop counts of the MF and MMSE detectors.
    Complexity,
    /// Density of the MF interference-plus-noise power.
    DeltaPdf,
}

impl From<Command> for Experiment {
    fn from(c: Command) -> Self {
        match c {
            Command::UncodedBer => Experiment::UncodedBer,
            Command::CodedBer => Experiment::CodedBer,
            Command::Capacity => Experiment::Capacity,
            Command::Complexity => Experiment::Complexity,
            Command::DeltaPdf => Experiment::DeltaPdf,
        }
    }
}

fn run(cli: &Cli) -> Result<String, CliError> {
    let mut raw = match &cli.config {
        Some(p) => parse_raw(&fs::read_to_string(p).map_err(|e| CliError::io(p, e))?)?,
        None => RawConfig::default(),
    };
    if let Some(s) = cli.seed {
        raw.set("seed", s.to_string());
    }
    if let Some(w) = cli.workers {
        raw.set("workers", w.to_string());
    }
    if let Some(o) = &cli.out {
        raw.set("output", o.display().to_string());
    }
    let cfg = SimConfig::resolve(&raw, cli.command.into())?;
    Ok(execute(&cfg, cli.dry_run)?.stdout)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", e.one_line());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
