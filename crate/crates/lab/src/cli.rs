//! Argument parsing for the `coherence-lab` binary.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::{exit_code, run, Command, ExperimentConfig, SpanVariant, Tolerances};

#[derive(Parser, Debug)]
#[command(
    name = "coherence-lab",
    version,
    about = "Coherence under time-translation covariant operations"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args, Debug)]
struct GlobalArgs {
    /// Seed for randomized commands.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// JSON map from symbol name to numeric value.
    #[arg(long, global = true)]
    valuation: Option<PathBuf>,
    #[arg(long, global = true)]
    tol_covariance: Option<f64>,
    #[arg(long, global = true)]
    mode_threshold: Option<f64>,
    #[arg(long, global = true)]
    tol_exact: Option<f64>,
    #[arg(long, global = true)]
    tol_formula: Option<f64>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Variant {
    Z,
    Q,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Print the generators of a state's mode set.
    Modes { state: PathBuf },
    /// Exit 0 when the modes of TARGET lie in the span of the modes of SOURCE.
    CheckSubset {
        #[arg(long, value_enum)]
        variant: Variant,
        target: PathBuf,
        source: PathBuf,
    },
    /// Print the commutator norm of a channel against time translation.
    Covariance { channel: PathBuf },
    #[command(subcommand)]
    Catalyst(CatalystCmd),
    /// Distances for the product-of-noisy-plus-states family.
    Counterexample {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        delta: f64,
        /// Emit one row for every m from 1 up to M.
        #[arg(long)]
        sweep: bool,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Catalyst recombination schedule over N roles and k levels.
    Schedule {
        #[arg(long = "N")]
        n: usize,
        #[arg(long)]
        k: usize,
        /// Input copies per catalyst set, to print the rate.
        #[arg(long)]
        mu: Option<u64>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Print QFI, WY skew information and relative entropy of asymmetry.
    Measures {
        state: PathBuf,
        /// Also score this many random states on the same Hamiltonian.
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Print the lattice basis of a spectrum and each level's coordinates.
    Embed {
        state: PathBuf,
        #[arg(long, default_value_t = -8, allow_negative_numbers = true)]
        min: i64,
        #[arg(long, default_value_t = 8)]
        max: i64,
    },
    /// Classify whether SOURCE can be converted to TARGET.
    Verdict { source: PathBuf, target: PathBuf },
}

#[derive(Subcommand, Debug)]
enum CatalystCmd {
    /// Build the correlated catalyst for an n-copy channel.
    Build {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        channel: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = coherence_core::tol::DIMENSION_CAP)]
        cap: usize,
    },
}

impl Cli {
    fn into_config(self) -> ExperimentConfig {
        let command = match self.command {
            Cmd::Modes { state } => Command::Modes { state },
            Cmd::CheckSubset {
                variant,
                target,
                source,
            } => Command::CheckSubset {
                variant: match variant {
                    Variant::Z => SpanVariant::Z,
                    Variant::Q => SpanVariant::Q,
                },
                target,
                source,
            },
            Cmd::Covariance { channel } => Command::Covariance { channel },
            Cmd::Catalyst(CatalystCmd::Build {
                n,
                state,
                channel,
                out,
                cap,
            }) => Command::CatalystBuild {
                n,
                state,
                channel,
                out,
                cap,
            },
            Cmd::Counterexample {
                m,
                eps,
                delta,
                sweep,
                csv,
            } => Command::Counterexample {
                m,
                eps,
                delta,
                sweep,
                csv,
            },
            Cmd::Schedule { n, k, mu, csv } => Command::Schedule { n, k, mu, csv },
            Cmd::Measures { state, trials, csv } => Command::Measures { state, trials, csv },
            Cmd::Embed { state, min, max } => Command::Embed {
                state,
                range: (min, max),
            },
            Cmd::Verdict { source, target } => Command::Verdict { source, target },
        };
        let d = Tolerances::default();
        let g = self.global;
        ExperimentConfig {
            command,
            seed: g.seed,
            valuation: g.valuation,
            tolerances: Tolerances {
                covariance: g.tol_covariance.unwrap_or(d.covariance),
                mode_threshold: g.mode_threshold.unwrap_or(d.mode_threshold),
                exact: g.tol_exact.unwrap_or(d.exact),
                formula: g.tol_formula.unwrap_or(d.formula),
            },
        }
    }
}

/// Parses `args` (program name first), runs, and returns the exit code.
pub fn main_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = run(&cli.into_config(), out);
    if let Err(e) = &result {
        let _ = writeln!(err, "error: {e}");
    }
    exit_code(&result)
}
