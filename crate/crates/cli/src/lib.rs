//! The `genderlex` command line and the annotation HTTP service.

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;
use genderlex_core::Error;

mod args;
mod commands;
pub mod config;
pub mod inputs;
pub mod service;

pub use args::Cli;

/// Validation, configuration and usage errors.
pub const EXIT_VALIDATION: i32 = 1;
/// I/O and parse errors.
pub const EXIT_IO: i32 = 2;

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io(_) | Error::Parse { .. } => EXIT_IO,
        _ => EXIT_VALIDATION,
    }
}

/// Parses `argv` and runs the subcommand. Data goes to `out`, diagnostics
/// to `err`; the return value is the process exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_VALIDATION } else { 0 };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
            } else {
                let _ = write!(out, "{text}");
            }
            return code;
        }
    };
    match commands::dispatch(cli, out, err) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}
