use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use tensor_chernoff::harness::{self, ExperimentConfig, Format};
use tensor_chernoff::Error;

#[derive(Parser)]
#[command(name = "tensor-chernoff", version, about = "Run tensor inequality and expander Chernoff experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the suite named in a config file and write a report.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = OutFormat::Json)]
        format: OutFormat,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Overrides the seed in the config.
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Json,
    Csv,
}

impl From<OutFormat> for Format {
    fn from(f: OutFormat) -> Self {
        match f {
            OutFormat::Json => Format::Json,
            OutFormat::Csv => Format::Csv,
        }
    }
}

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    let Command::Run {
        config,
        out,
        format,
        workers,
        seed,
    } = cli.command;
    if workers == 0 {
        eprintln!("error: --workers must be at least 1");
        return ExitCode::from(EXIT_USAGE);
    }
    let mut cfg = match ExperimentConfig::from_file(&config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let report = match harness::run(&cfg, workers) {
        Ok(r) => r,
        Err(e @ (Error::Config(_) | Error::Argument(_) | Error::Io(_))) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_FAIL);
        }
    };
    if let Err(e) = harness::emit(&report, format.into(), &out) {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_USAGE);
    }
    let failed: Vec<_> = report.failures().collect();
    let skipped = report.checks.iter().filter(|c| c.skipped.is_some() && c.pass).count();
    eprintln!(
        "{}: {} checks, {} failed, {} skipped",
        cfg.suite.label(),
        report.checks.len(),
        failed.len(),
        skipped
    );
    for c in &failed {
        eprintln!("FAIL {} lhs={:?} rhs={:?} {}", c.name, c.lhs, c.rhs, c.skipped.as_deref().unwrap_or(""));
    }
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAIL)
    }
}
