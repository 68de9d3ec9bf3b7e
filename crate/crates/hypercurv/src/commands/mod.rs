pub mod classify;
pub mod immersion;
pub mod invariants;
pub mod ladder;
pub mod scan;
pub mod simons;
pub mod verify;

use crate::config::Settings;
use crate::error::CliResult;
use crate::output::{render, Report};

/// Rendered report plus whether its checks held.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub text: String,
    pub passed: bool,
}

pub fn finish<R: Report>(report: &R, settings: &Settings) -> CliResult<Outcome> {
    Ok(Outcome { text: render(report, settings.format)?, passed: report.passed() })
}
