use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use oalab::output::{result_dir, write_outputs};
use oalab::spec::ExperimentSpec;
use oalab::{csv_digest, report, run, selftest};

#[derive(Parser)]
#[command(name = "oalab", version, about = "Experiments with orthogonally additive operators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the pipelines of an experiment spec and write CSV + JSON.
    Run {
        spec: PathBuf,
        /// Output directory (RESULT_DIR takes precedence).
        #[arg(long, default_value = "results")]
        out: PathBuf,
    },
    /// Summarize a results CSV.
    Report { csv: PathBuf },
    /// Run the built-in invariant suite.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "results")]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Run { spec, out } => cmd_run(&spec, &out),
        Command::Report { csv } => cmd_report(&csv),
        Command::Selftest { seed, out } => cmd_selftest(seed, &out),
    };
    ExitCode::from(code)
}

fn cmd_run(path: &std::path::Path, out: &std::path::Path) -> u8 {
    let spec = match ExperimentSpec::load(path) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    let outcome = match run::run_experiment(&spec) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {}: {e}", spec.name);
            return 1;
        }
    };
    let dir = result_dir(out);
    match write_outputs(&dir, spec.output_stem(), &spec.name, spec.seed, &outcome) {
        Ok((csv, json)) => println!("wrote {} and {}", csv.display(), json.display()),
        Err(e) => {
            eprintln!("error: writing results to {}: {e}", dir.display());
            return 1;
        }
    }
    for f in &outcome.failures {
        eprintln!("assertion failed: {f}");
    }
    for c in &outcome.coarse {
        eprintln!("{c}");
    }
    outcome.exit_code() as u8
}

fn cmd_report(path: &std::path::Path) -> u8 {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {}: {e}", path.display());
            return 1;
        }
    };
    match report::summarize(&text) {
        Ok(s) => {
            print!("{s}");
            0
        }
        Err(e) => {
            eprintln!("error: {}: {e}", path.display());
            1
        }
    }
}

fn cmd_selftest(seed: u64, out: &std::path::Path) -> u8 {
    let result = match selftest::run(seed) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    for l in &result.lines {
        println!("{l}");
    }
    let dir = result_dir(out);
    match write_outputs(&dir, "selftest", "selftest", seed, &result.outcome) {
        Ok((csv, _)) => {
            let text = std::fs::read_to_string(&csv).unwrap_or_default();
            println!("digest {}", csv_digest(&text));
        }
        Err(e) => {
            eprintln!("error: writing results to {}: {e}", dir.display());
            return 1;
        }
    }
    for f in &result.outcome.failures {
        eprintln!("assertion failed: {f}");
    }
    result.outcome.exit_code() as u8
}
