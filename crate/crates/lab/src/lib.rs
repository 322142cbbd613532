//! File formats, command-line front end and experiment runner for
//! [`coherence_core`].
//!
//! Every command reads JSON inputs, prints a short report and may write CSV
//! or JSON artifacts. Artifacts are written atomically. Exit codes: 0 when
//! the checked contract holds, 1 on a contract or tolerance violation, 2 on
//! a usage or parse error.

pub mod cli;
pub mod config;
pub mod error;
pub mod format;
pub mod output;
pub mod valuation;

pub use config::{run, Command, ExperimentConfig, Outcome, SpanVariant, Tolerances};
pub use error::LabError;
