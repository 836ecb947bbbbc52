use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use fdcert::sweep::{
    moment_report, parameter_grid, run_estimates, run_sweep, write_estimate_csv, write_sweep_csv, Model,
};
use fdcert::verify::{run_verify, VerifyLevel};
use fdcert::Error;

const EXIT_USAGE: u8 = 1;
const EXIT_NUMERICAL: u8 = 2;
const EXIT_VERIFY: u8 = 3;

#[derive(Parser)]
#[command(name = "fdcert", version, about = "Diamond-distance certificates from average fidelity and fidelity deviation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate all bounds over a parameter grid and write CSV.
    Sweep {
        #[arg(long)]
        model: Model,
        /// Qubit count, QFT only (2..=10).
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 1e-3)]
        min: f64,
        #[arg(long, default_value_t = 1.0)]
        max: f64,
        #[arg(long, default_value_t = 50)]
        steps: usize,
        /// Geometric instead of linear spacing.
        #[arg(long)]
        log_grid: bool,
        /// Unitarity used for the b_ru_at_u column.
        #[arg(long, default_value_t = 1.0)]
        unitarity: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Simulate the sampling protocol and write the estimates as CSV.
    Estimate {
        #[arg(long)]
        model: Model,
        #[arg(long)]
        param: f64,
        /// Number of random input states M.
        #[arg(long)]
        samples: usize,
        /// Shots per input state N.
        #[arg(long)]
        shots: u64,
        #[arg(long)]
        seed: u64,
        /// Independent runs with seeds seed, seed+1, ...
        #[arg(long, default_value_t = 1)]
        repeats: usize,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print moments, traces and all bounds for one error.
    Moments {
        #[arg(long)]
        model: Model,
        #[arg(long)]
        param: f64,
        #[arg(long)]
        n: Option<usize>,
        /// Unitarity used for the (r, u) bound.
        #[arg(long, default_value_t = 1.0)]
        unitarity: f64,
        /// Print a header and one CSV row instead of key: value lines.
        #[arg(long)]
        csv: bool,
    },
    /// Run the built-in consistency checks.
    Verify {
        /// Full sample counts (slower).
        #[arg(long)]
        full: bool,
    },
}

enum Failure {
    Usage(String),
    Numerical(String),
    Verification,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Eigensolver { .. } | Error::NotUnitary { .. } => Failure::Numerical(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

fn write_file(path: &Path, body: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> Result<(), Failure> {
    let io = |e: std::io::Error| Failure::Usage(format!("{}: {e}", path.display()));
    let mut w = BufWriter::new(File::create(path).map_err(io)?);
    body(&mut w).map_err(io)?;
    w.flush().map_err(io)
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Sweep { model, n, min, max, steps, log_grid, unitarity, out } => {
            let qubits = model.qubits(n)?;
            let grid = parameter_grid(min, max, steps, log_grid)?;
            let rows = run_sweep(model, qubits, &grid, unitarity)?;
            write_file(&out, |w| write_sweep_csv(w, &rows))
        }
        Command::Estimate { model, param, samples, shots, seed, repeats, n, out } => {
            let qubits = model.qubits(n)?;
            let rows = run_estimates(model, qubits, param, samples, shots, seed, repeats)?;
            write_file(&out, |w| write_estimate_csv(w, &rows))
        }
        Command::Moments { model, param, n, unitarity, csv } => {
            let qubits = model.qubits(n)?;
            let report = moment_report(model, qubits, param, unitarity)?;
            print!("{}", if csv { report.to_csv() } else { report.to_text() });
            Ok(())
        }
        Command::Verify { full } => {
            let report = run_verify(if full { VerifyLevel::Full } else { VerifyLevel::Quick });
            println!("{report}");
            if report.all_passed() {
                Ok(())
            } else {
                Err(Failure::Verification)
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("numerical failure: {msg}");
            ExitCode::from(EXIT_NUMERICAL)
        }
        Err(Failure::Verification) => ExitCode::from(EXIT_VERIFY),
    }
}
