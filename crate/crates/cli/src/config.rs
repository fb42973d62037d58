//! TOML config loading with line-precise diagnostics.

use std::path::Path;

use serde::de::DeserializeOwned;

use crate::error::CliError;

/// 1-based line and column of byte `offset` in `text`.
fn locate(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

pub fn parse<T: DeserializeOwned>(path: &str, text: &str) -> Result<T, CliError> {
    toml::from_str(text).map_err(|e| {
        let (line, column) = e.span().map_or((1, 1), |s| locate(text, s.start));
        CliError::Config {
            path: path.into(),
            line,
            column,
            message: e.message().trim_end().to_string(),
        }
    })
}

pub fn load<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse(&path.display().to_string(), &text)
}

/// Attaches the config path to a validation failure.
pub fn invalid(path: Option<&Path>, source: finite_bb84::Error) -> CliError {
    match path {
        Some(p) => CliError::Invalid {
            path: p.display().to_string(),
            source,
        },
        None => CliError::Library(source),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde::Deserialize;

    #[derive(Debug, Deserialize)]
    #[serde(deny_unknown_fields)]
    #[allow(dead_code)]
    struct Sample {
        a: usize,
        b: f64,
    }

    #[test]
    fn errors_carry_line_and_column() {
        let err = parse::<Sample>("x.toml", "a = 1\nb = \"no\"\n").unwrap_err();
        match err {
            CliError::Config { line, column, .. } => assert_eq!((line, column), (2, 5)),
            other => panic!("{other}"),
        }
        let err = parse::<Sample>("x.toml", "a = 1\nb = 2.0\nc = 3\n").unwrap_err();
        assert!(err.to_string().starts_with("x.toml:3:1:"), "{err}");
    }

    #[test]
    fn locate_counts_from_one() {
        assert_eq!(locate("ab\ncd", 0), (1, 1));
        assert_eq!(locate("ab\ncd", 4), (2, 2));
    }
}
