//! Command-line front end of `sphere-re`: evaluates shapes, solves for
//! masses, traces branches, runs scans and the constants suite, and
//! writes the results as CSV or JSON.
//!
//! Exit status: 0 on success, 1 on I/O failure, 2 on a domain error of
//! the computation, 3 when `verify` finds a failing check, 64 on a usage
//! error.

pub mod args;
pub mod commands;
pub mod expr;
pub mod output;

use std::fmt;

pub use args::Cli;
pub use commands::{run, Outcome};

pub const EXIT_IO: u8 = 1;
pub const EXIT_DOMAIN: u8 = 2;
pub const EXIT_VERIFY: u8 = 3;
pub const EXIT_USAGE: u8 = 64;

/// Arguments that parse but do not form a valid request.
#[derive(Debug, Clone, PartialEq)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn exit_code(e: &anyhow::Error) -> u8 {
    if e.downcast_ref::<UsageError>().is_some() {
        EXIT_USAGE
    } else if e.downcast_ref::<sphere_re::Error>().is_some() {
        EXIT_DOMAIN
    } else {
        EXIT_IO
    }
}
