//! Flat `key = value` config files merged under command-line flags.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::path::Path;

use clap::parser::ValueSource;
use clap::{ArgAction, ArgMatches, Command};

use crate::error::CliError;

/// Parses `key = value` lines. Blank lines and lines starting with `#` are
/// skipped; keys and values are trimmed. Repeated keys are rejected.
pub fn parse_config(text: &str) -> Result<Vec<(String, String)>, CliError> {
    let mut seen = BTreeSet::new();
    let mut pairs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("config line {}: expected `key = value`", i + 1)))?;
        let key = key.trim().to_string();
        if key.is_empty() {
            return Err(CliError::Usage(format!("config line {}: empty key", i + 1)));
        }
        if !seen.insert(key.clone()) {
            return Err(CliError::Usage(format!("config key {key:?} given twice")));
        }
        pairs.push((key, value.trim().to_string()));
    }
    Ok(pairs)
}

/// Turns config pairs into flags for `sub`, dropping keys already given on
/// the command line.
///
/// Keys are long flag names; `_` and `-` are interchangeable. Boolean flags
/// take `true` or `false`.
pub fn config_flags(
    sub: &Command,
    matches: &ArgMatches,
    pairs: &[(String, String)],
) -> Result<Vec<OsString>, CliError> {
    let mut flags = Vec::new();
    for (key, value) in pairs {
        let wanted = key.replace('_', "-");
        let arg = sub
            .get_arguments()
            .find(|a| a.get_long().is_some_and(|l| l.replace('_', "-") == wanted))
            .filter(|a| a.get_id() != "config")
            .ok_or_else(|| CliError::Usage(format!("unknown config key {key:?} for `{}`", sub.get_name())))?;
        if matches.value_source(arg.get_id().as_str()) == Some(ValueSource::CommandLine) {
            continue;
        }
        let long = arg.get_long().expect("found by long name");
        if matches!(arg.get_action(), ArgAction::SetTrue) {
            match value.as_str() {
                "true" => flags.push(OsString::from(format!("--{long}"))),
                "false" => {}
                _ => return Err(CliError::Usage(format!("config key {key:?} takes true or false"))),
            }
        } else {
            flags.push(OsString::from(format!("--{long}={value}")));
        }
    }
    Ok(flags)
}

/// Reads and parses a config file.
pub fn read_config(path: &Path) -> Result<Vec<(String, String)>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    parse_config(&text)
}
