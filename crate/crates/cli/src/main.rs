//! `eulerseq`: generate, verify and report on Euler-quotient threshold sequences.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use eulerseq::defining::DEFAULT_MAX_DEGREE;

/// Exit codes: 0 success, 1 failed verification, 2 invalid parameters, 3 I/O failure.
#[derive(Debug)]
pub enum Failure {
    Params(String),
    Io(anyhow::Error),
    Verification,
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Verification => 1,
            Failure::Params(_) => 2,
            Failure::Io(_) => 3,
        }
    }
}

impl From<eulerseq::Error> for Failure {
    fn from(e: eulerseq::Error) -> Self {
        match e {
            eulerseq::Error::Io(io) => Failure::Io(io.into()),
            other => Failure::Params(other.to_string()),
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "eulerseq", version, about = "Euler-quotient binary threshold sequences")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write the sequence in the ESEQ1 format.
    Generate(GenerateArgs),
    /// Run the verification suite and print a JSON report of every check.
    Verify(VerifyArgs),
    /// Print the consolidated analysis document.
    Report(ReportArgs),
}

#[derive(Args, Debug, Clone)]
pub struct ParamArgs {
    /// Odd prime.
    #[arg(short = 'p')]
    pub p: u64,
    /// Level of the quotient, at least 1.
    #[arg(short = 'r')]
    pub r: u32,
    /// Ceiling on the ambient field degree.
    #[arg(long, env = "EULERSEQ_MAX_DEGREE", default_value_t = DEFAULT_MAX_DEGREE)]
    pub max_degree: usize,
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum Format {
    Ascii,
    Bin,
    Json,
}

#[derive(Args, Debug)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    /// Number of terms; one period when omitted.
    #[arg(short = 'n', long = "count")]
    pub count: Option<u64>,
    #[arg(long, value_enum, default_value_t = Format::Ascii)]
    pub format: Format,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    /// Every check group (the default when no group is selected).
    #[arg(long)]
    pub all: bool,
    #[arg(long)]
    pub defining: bool,
    #[arg(long)]
    pub trace: bool,
    #[arg(long)]
    pub lemmas: bool,
    #[arg(long)]
    pub lincomp: bool,
    /// Include wall-clock timings, which makes the output nondeterministic.
    #[arg(long)]
    pub timing: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct ReportArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    /// Include wall-clock timings, which makes the output nondeterministic.
    #[arg(long)]
    pub timing: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(args) => commands::generate(&args),
        Command::Verify(args) => commands::verify(&args),
        Command::Report(args) => commands::report(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            match &failure {
                Failure::Params(msg) => eprintln!("error: {msg}"),
                Failure::Io(e) => eprintln!("error: {e:#}"),
                Failure::Verification => eprintln!("verification failed"),
            }
            ExitCode::from(failure.code())
        }
    }
}
