//! `ringmod` command-line front end.

mod commands;
mod output;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use ringmod::{Error, Exec};

use output::Format;

const EXIT_DOMAIN: u8 = 2;
const EXIT_NUMERIC: u8 = 3;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(name = "ringmod", version, about = "Conformal moduli of rings and semirings")]
pub struct Cli {
    /// Output format; `table` defaults to csv, everything else to json.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for sampling commands.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value = "parallel")]
    exec: ExecArg,
    #[command(subcommand)]
    command: commands::Command,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
enum ExecArg {
    Sequential,
    Parallel,
}

/// Failure of a command, mapped to an exit code.
#[derive(Debug)]
pub enum Failure {
    Core(Error),
    Input(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Core(Error::Resolution(_) | Error::Convergence { .. }) => EXIT_NUMERIC,
            _ => EXIT_DOMAIN,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            Failure::Core(Error::Domain(_)) => "domain",
            Failure::Core(Error::InsufficientModulus { .. }) => "insufficient_modulus",
            Failure::Core(Error::Resolution(_)) => "resolution",
            Failure::Core(Error::Convergence { .. }) => "convergence",
            Failure::Core(Error::Unsupported(_)) => "unsupported",
            Failure::Input(_) => "input",
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Core(e) => e.to_string(),
            Failure::Input(m) => m.clone(),
        }
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var("RINGMOD_THREADS") else { return Ok(()) };
    let threads: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| Failure::Input(format!("RINGMOD_THREADS must be a positive integer, got {v:?}")))?;
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure::Input(format!("cannot size the thread pool: {e}")))?;
    #[cfg(not(feature = "parallel"))]
    let _ = threads;
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    configure_threads()?;
    let exec = match cli.exec {
        ExecArg::Sequential => Exec::Sequential,
        ExecArg::Parallel => Exec::Parallel,
    };
    let ctx = commands::Context { exec, seed: cli.seed };
    let default_format = if matches!(cli.command, commands::Command::Table(_)) { Format::Csv } else { Format::Json };
    let result = commands::dispatch(&cli.command, &ctx)?;
    let text = result.render(cli.format.unwrap_or(default_format));
    match &cli.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()).ok();
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let body = serde_json::json!({"error": {"kind": f.kind(), "message": f.message()}});
            eprintln!("{}", output::json(&body));
            ExitCode::from(f.code())
        }
    }
}

