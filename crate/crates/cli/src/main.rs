use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use multires::{run, CliError, Command, Options, ProblemFile};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
enum Emit {
    Trace,
    Report,
    Both,
}

/// Exact resolution of multi-ideals on affine charts.
#[derive(Debug, Parser)]
#[command(name = "multires", version)]
struct Args {
    command: Command,
    /// Problem file (JSON, or the monomial line format).
    problem: PathBuf,
    #[arg(long, default_value_t = Options::default().chart_limit)]
    chart_limit: usize,
    #[arg(long, default_value_t = Options::default().step_cap)]
    step_cap: usize,
    /// Seed of the point sampler.
    #[arg(long, default_value_t = Options::default().seed)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Emit::Report)]
    emit: Emit,
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(&args) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn execute(args: &Args) -> Result<u8, CliError> {
    let src = std::fs::read_to_string(&args.problem)
        .map_err(|source| CliError::Io { path: args.problem.display().to_string(), source })?;
    let file = ProblemFile::parse(&src)?;
    let options = Options { step_cap: args.step_cap, chart_limit: args.chart_limit, seed: args.seed };
    let out = run(args.command, &file, &options)?;
    if matches!(args.emit, Emit::Report | Emit::Both) {
        print!("{}", out.report);
    }
    if matches!(args.emit, Emit::Trace | Emit::Both) {
        print!("{}", out.trace.to_json());
    }
    match out.error {
        None => Ok(0),
        Some(e) => {
            eprintln!("error: {e}");
            Ok(e.exit_code() as u8)
        }
    }
}
