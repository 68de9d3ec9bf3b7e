//! Command-line front end for `hypercurv-core`: JSON formats, the external
//! shape protocol and a parallel grid executor.

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod parallel;
pub mod schema;
pub mod subprocess;

use clap::Parser;

use crate::cli::{Cli, Command};
use crate::commands::Outcome;
use crate::config::{ConfigFile, Settings, SEED_VAR};
use crate::error::CliResult;

pub const EXIT_OK: u8 = 0;
pub const EXIT_ERROR: u8 = 1;
pub const EXIT_FAILED: u8 = 2;

pub fn run(cli: &Cli) -> CliResult<Outcome> {
    let file = match &cli.global.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    let env_seed = std::env::var(SEED_VAR).ok();
    let settings = Settings::resolve(&cli.global, env_seed.as_deref(), &file)?;
    match &cli.command {
        Command::Invariants(a) => commands::invariants::run(a, &settings),
        Command::Ladder(a) => commands::ladder::run(a, &settings),
        Command::Classify(a) => commands::classify::run(a, &settings),
        Command::Scan(a) => commands::scan::run(a, &settings),
        Command::Simons(a) => commands::simons::run(a, &settings),
        Command::ImmersionEval(a) => commands::immersion::run(a, &settings),
        Command::VerifyAll(a) => commands::verify::run(a, &settings),
        Command::ShapeServer(a) => commands::immersion::serve_shape(a),
    }
}

/// Parses arguments, runs the command and writes its report. Returns the
/// exit status: 0 success, 1 usage or input error, 2 failed verification.
pub fn main_with<I, T>(args: I, out: &mut dyn std::io::Write, err: &mut dyn std::io::Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{e}");
            return if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
        }
    };
    match run(&cli) {
        Ok(outcome) => {
            if out.write_all(outcome.text.as_bytes()).and_then(|_| out.flush()).is_err() {
                return EXIT_ERROR;
            }
            if outcome.passed {
                EXIT_OK
            } else {
                EXIT_FAILED
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_ERROR
        }
    }
}
