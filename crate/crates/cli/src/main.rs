mod commands;
mod input;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use input::StateArgs;

#[derive(Parser, Debug)]
#[command(
    name = "rebit",
    version,
    about = "Rebit phase-space tools: Wigner functions, CSS simulation, contextuality and state injection"
)]
struct Cli {
    /// Worker threads for parallel sections.
    #[arg(long, global = true, env = "REBIT_THREADS")]
    threads: Option<usize>,
    /// Output format for data and reports.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write data to this file instead of stdout.
    #[arg(long, short, global = true, value_name = "FILE")]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the Wigner table of a state.
    Wigner {
        #[command(flatten)]
        state: StateArgs,
    },
    /// Decide contextuality from the Wigner table.
    Classify {
        #[command(flatten)]
        state: StateArgs,
        /// Treat the input as diagonal in the eigenbasis of these commuting
        /// generators, e.g. `XZ,ZX`.
        #[arg(long, value_name = "GENS")]
        diagonal_in: Option<String>,
    },
    /// Classify a one- or two-parameter family on a grid.
    Sweep {
        /// Parameter family to sweep.
        #[arg(long, value_parser = ["one-rebit-xz", "two-rebit-ab"])]
        family: String,
        /// Grid points per axis.
        #[arg(long, default_value_t = 201)]
        resolution: usize,
        /// Lower end of both parameter axes.
        #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
        min: f64,
        /// Upper end of both parameter axes.
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        max: f64,
        /// Fail unless verdicts follow the closed-form regions.
        #[arg(long)]
        check: bool,
    },
    /// Sample a CSS circuit with the phase-space simulator.
    Simulate {
        /// Circuit file: an `INIT` line, then gates and `MEASX`/`MEASZ` lines.
        #[arg(long, value_name = "FILE")]
        circuit: PathBuf,
        /// Number of samples.
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        /// Base seed; sample k uses its own stream.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Compare against dense Born probabilities.
        #[arg(long)]
        compare_dense: bool,
        /// Largest accepted total-variation distance.
        #[arg(long, default_value_t = 0.02)]
        tolerance: f64,
    },
    /// Check that exactly the CSS real stabilizer states have W >= 0.
    Hudson {
        /// Number of rebits (1 to 3).
        #[arg(long)]
        n: usize,
        /// Random real pure states for negativity statistics.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        /// Seed for the random states.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Evaluate a contextuality witness by both routes.
    Witness {
        #[command(flatten)]
        state: StateArgs,
        /// Isotropic basis of symmetric Pauli labels, e.g. `XZ,ZX`.
        #[arg(long)]
        basis: String,
        /// Bit string selecting the witness, one bit per basis element.
        #[arg(long)]
        x: String,
    },
    /// Run a logical circuit through the encoded injection gadgets.
    Inject {
        /// Lines `H i`, `T i`, `CNOT i j`, `MEASZ i`.
        #[arg(long, value_name = "FILE")]
        circuit: PathBuf,
        /// Seed for measurement outcomes.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Compare every measurement branch with the complex oracle.
        #[arg(long)]
        validate: bool,
        /// Sample this many encoded runs and compare readout statistics.
        #[arg(long, default_value_t = 0)]
        shots: usize,
        /// Write the primitive-operation log of the seeded run as JSON.
        #[arg(long, value_name = "FILE")]
        log: Option<PathBuf>,
    },
}

/// Outcome of a subcommand that did its work.
pub enum Status {
    Ok,
    VerificationFailed(String),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: cannot configure {t} threads: {e}");
            return ExitCode::from(2);
        }
    }
    let out = commands::Output::new(cli.format, cli.output.clone());
    let result = match &cli.command {
        Command::Wigner { state } => commands::wigner(&out, state),
        Command::Classify { state, diagonal_in } => commands::classify(&out, state, diagonal_in.as_deref()),
        Command::Sweep {
            family,
            resolution,
            min,
            max,
            check,
        } => commands::sweep(&out, family, *resolution, *min, *max, *check),
        Command::Simulate {
            circuit,
            samples,
            seed,
            compare_dense,
            tolerance,
        } => commands::simulate(&out, circuit, *samples, *seed, *compare_dense, *tolerance),
        Command::Hudson { n, samples, seed } => commands::hudson(&out, *n, *samples, *seed),
        Command::Witness { state, basis, x } => commands::witness(&out, state, basis, x),
        Command::Inject {
            circuit,
            seed,
            validate,
            shots,
            log,
        } => commands::inject(&out, circuit, *seed, *validate, *shots, log.as_deref()),
    };
    match result {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::VerificationFailed(why)) => {
            eprintln!("verification failed: {why}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
