//! Configuration-driven front end for `wavedisp-core`.
//!
//! Every run is described by a [`config::RunConfig`]; the shipped presets in
//! [`presets`] reproduce the acceptance suite. Commands return a JSON report
//! and an exit code: 0 when every asserted check passed, 1 when one failed,
//! 2 when the configuration was rejected before any computation finished.

pub mod commands;
pub mod config;
pub mod output;
pub mod presets;

use wavedisp_core::Error;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] Error),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// Rejections of the run's setup exit with 2; numerical failures with 1.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Core(e) => match e {
                Error::InvalidLattice(_)
                | Error::MemoryCap { .. }
                | Error::CflViolation(_)
                | Error::BranchDomain { .. }
                | Error::ZeroWavenumber
                | Error::UnsupportedBackground(_)
                | Error::InvalidParameter(_)
                | Error::Domain(_)
                | Error::TooFewPoints { .. } => 2,
                _ => 1,
            },
        }
    }
}

/// Process exit code of a finished run.
pub fn verdict_code(passed: bool) -> u8 {
    if passed {
        0
    } else {
        1
    }
}
