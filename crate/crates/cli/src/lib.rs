//! Config-driven front end: parses a run config, dispatches one computation
//! and writes a CSV table plus a JSON result envelope next to it.

pub mod commands;
pub mod config;
pub mod envelope;
pub mod tables;

use std::fmt;

use squid_harmonics::{Error, ErrorClass};

pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;
pub const EXIT_NON_CONVERGENCE: i32 = 4;
pub const EXIT_UNIDENTIFIABLE: i32 = 5;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_CONFIG,
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e.class() {
            ErrorClass::Input => EXIT_CONFIG,
            ErrorClass::Solver => EXIT_SOLVER,
            ErrorClass::NonConvergence => EXIT_NON_CONVERGENCE,
            ErrorClass::Unidentifiable => EXIT_UNIDENTIFIABLE,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}
