//! Command-line front end. Parsing stays in [`args`], defaults and config
//! files in [`settings`], execution in [`exec`]; [`run`] wires them together
//! and converts every failure into the documented exit codes (0 success,
//! 2 configuration error, 1 I/O failure).

pub mod args;
pub mod exec;
pub mod settings;

use std::ffi::OsString;
use std::fmt;

use clap::Parser;

#[derive(Debug)]
pub enum CliError {
    /// Bad keys, bad values, impossible combinations: exit code 2.
    Config(String),
    /// Failures writing reports or transcripts: exit code 1.
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) | CliError::Io(msg) => write!(f, "{msg}"),
        }
    }
}

impl From<qtpp_core::CoreError> for CliError {
    fn from(e: qtpp_core::CoreError) -> Self {
        CliError::Config(e.to_string())
    }
}

pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match args::Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // clap exits 2 on usage errors and 0 on --help/--version
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    match exec::execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
