use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qpcalc::model::{emit_json, emit_text, resolve_source, run_checks, RunOptions, CHECKS};

/// Exact checks for graded symplectic models.
#[derive(Parser)]
#[command(name = "qpcalc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the checks declared in a model file.
    Check {
        /// Model file.
        #[arg(required_unless_present = "list_checks")]
        model: Option<PathBuf>,
        /// Write the structured report here; `-` prints it instead of the text report.
        #[arg(long, value_name = "PATH")]
        json: Option<PathBuf>,
        /// Seed for every sampled check.
        #[arg(long)]
        seed: Option<u64>,
        /// Number of random trials for every sampled check.
        #[arg(long)]
        trials: Option<usize>,
        /// Run independent checks concurrently.
        #[arg(long)]
        parallel: bool,
        /// List the available checks and exit.
        #[arg(long)]
        list_checks: bool,
    },
}

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    let Command::Check { model, json, seed, trials, parallel, list_checks } = cli.command;
    if list_checks {
        for c in CHECKS {
            println!("{:<30} {}", c.name, c.anchor);
        }
        return ExitCode::SUCCESS;
    }
    let path = model.expect("clap requires a model");
    let src = match std::fs::read_to_string(&path) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("qpcalc: cannot read {}: {e}", path.display());
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let shown = path.display();
    let model = match resolve_source(&src) {
        Ok(m) => m,
        Err(e) => {
            eprintln!("{shown}:{e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let report = match run_checks(&model, &name, &RunOptions { seed, trials, parallel }) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("{shown}:{e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let to_stdout = json.as_deref() == Some(Path::new("-"));
    if !to_stdout {
        print!("{}", emit_text(&report));
    }
    if let Some(out) = json {
        let text = emit_json(&report);
        if to_stdout {
            print!("{text}");
        } else if let Err(e) = std::fs::write(&out, text) {
            eprintln!("qpcalc: cannot write {}: {e}", out.display());
            return ExitCode::from(EXIT_USAGE);
        }
    }
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAIL)
    }
}
