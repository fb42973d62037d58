pub mod bound;
pub mod decoy;
pub mod oracle;
pub mod rates;
pub mod simulate;
pub mod toeplitz;

use std::path::Path;

use serde::de::DeserializeOwned;

use crate::config;
use crate::error::CliError;
use crate::Global;

pub struct Context<'a> {
    pub global: &'a Global,
}

impl Context<'_> {
    pub fn config_path(&self) -> Option<&Path> {
        self.global.config.as_deref()
    }

    /// The parsed `--config` file, if one was given.
    pub fn load<T: DeserializeOwned>(&self) -> Result<Option<T>, CliError> {
        self.config_path().map(config::load).transpose()
    }

    pub fn require<T: DeserializeOwned>(&self, command: &str) -> Result<T, CliError> {
        self.load()?
            .ok_or_else(|| CliError::Usage(format!("{command} needs --config <FILE>")))
    }

    pub fn invalid(&self, source: finite_bb84::Error) -> CliError {
        config::invalid(self.config_path(), source)
    }

    /// Rejects `--seed` for commands that draw nothing at random.
    pub fn no_seed(&self, command: &str) -> Result<(), CliError> {
        match self.global.seed {
            Some(_) => Err(CliError::Usage(format!("{command} is deterministic and takes no --seed"))),
            None => Ok(()),
        }
    }

    pub fn no_guard(&self, command: &str) -> Result<(), CliError> {
        match self.global.guard_override {
            Some(_) => Err(CliError::Usage(format!("{command} has no size guard to override"))),
            None => Ok(()),
        }
    }
}

/// Pads each column of `rows` to a common width.
pub fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for r in rows {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.len());
        }
    }
    let line = |cells: Vec<&str>| {
        let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        padded.join("  ").trim_end().to_string() + "\n"
    };
    let mut s = line(header.to_vec());
    for r in rows {
        s.push_str(&line(r.iter().map(String::as_str).collect()));
    }
    s
}

pub fn mark(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "FAIL"
    }
}
