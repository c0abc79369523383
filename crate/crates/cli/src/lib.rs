//! Config-driven experiment runner on top of `anisolab`.
//!
//! A run parses a flat JSON config, builds every parameter object up front
//! and then evaluates the sweep into a [`report::Report`].

pub mod config;
pub mod error;
pub mod report;
pub mod scenarios;

use config::Config;
use error::CliError;
use report::Report;

/// Plans and evaluates a parsed config.
pub fn execute(cfg: &Config) -> Result<Report, CliError> {
    let plan = scenarios::plan(cfg)?;
    Ok(scenarios::run(&plan))
}
