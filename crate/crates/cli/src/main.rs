//! `xxchain`: correlator, formfactor and momentum-distribution tables for the
//! XX chain, the asymptotic constants, and the acceptance suite.
//!
//! Exit codes: 0 ok, 1 verification failure, 2 invalid input, 3 numerical
//! assertion failure.

mod commands;
mod output;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::output::Format;

#[derive(Debug, Parser)]
#[command(name = "xxchain", version, about = "Exact and asymptotic quantities of the XX spin chain")]
struct Cli {
    /// Worker threads (default: all cores; XXCHAIN_THREADS caps this).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Write to this file instead of stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// G(x) on the finite chain.
    Correlator {
        #[command(flatten)]
        args: commands::CorrelatorArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Formfactors of σ⁻ between the ket ground state and a bra.
    Formfactor {
        #[command(flatten)]
        args: commands::FormfactorArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Momentum distribution n(q).
    Nq {
        #[command(flatten)]
        args: commands::NqArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Asymptotic constants (C0 by three routes, Glaisher A, C1, C2, C2′).
    Constants {
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Run the acceptance suite.
    Verify(commands::VerifyArgs),
}

/// A failure with the exit code it maps to.
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl From<xxchain::XxError> for Failure {
    fn from(e: xxchain::XxError) -> Self {
        Failure {
            code: if e.is_numerical() { 3 } else { 2 },
            message: e.to_string(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure {
            code: 2,
            message: format!("i/o error: {e}"),
        }
    }
}

pub fn invalid(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

fn thread_count(flag: Option<usize>) -> Result<usize, Failure> {
    let cores = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    let cap = match std::env::var("XXCHAIN_THREADS") {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| invalid(format!("XXCHAIN_THREADS = {v:?} is not a positive integer")))?,
        Err(_) => usize::MAX,
    };
    match flag {
        Some(0) => Err(invalid("--threads must be positive")),
        Some(n) => Ok(n.min(cap)),
        None => Ok(cores.min(cap)),
    }
}

fn emit(doc: &output::Document, out: &OutputArgs) -> Result<(), Failure> {
    match &out.output {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            doc.write(out.format, &mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            doc.write(out.format, &mut w)?;
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let threads = thread_count(cli.threads)?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| invalid(format!("thread pool: {e}")))?;
    match cli.command {
        Command::Correlator { args, out } => emit(&commands::correlator(&args)?, &out)?,
        Command::Formfactor { args, out } => emit(&commands::formfactor(&args)?, &out)?,
        Command::Nq { args, out } => emit(&commands::nq(&args)?, &out)?,
        Command::Constants { out } => emit(&commands::constants()?, &out)?,
        Command::Verify(args) => return commands::verify(&args),
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
