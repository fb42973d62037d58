//! Report envelope: every report carries a [`RunManifest`] whose digest is
//! the SHA-256 of the body's canonical JSON (keys sorted, no whitespace).

use serde::Serialize;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

pub const SCHEMA: &str = "fbb84-report/1";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config: Vec<String>,
    /// Command-line arguments after the subcommand, `--out` removed.
    pub arguments: Vec<String>,
    /// Absent for commands that use no randomness.
    pub seed: Option<u64>,
    pub version: String,
    pub digest: String,
}

/// What a command hands back for rendering.
pub struct Outcome {
    pub body: Value,
    pub text: String,
    /// False when some bound or invariant check failed.
    pub passed: bool,
    pub seed: Option<u64>,
}

impl Outcome {
    pub fn new<T: Serialize>(body: &T, text: String, passed: bool) -> Self {
        let mut map = match serde_json::to_value(body).expect("report bodies serialize") {
            Value::Object(m) => m,
            other => {
                let mut m = Map::new();
                m.insert("value".into(), other);
                m
            }
        };
        map.insert("passed".into(), Value::Bool(passed));
        Self {
            body: Value::Object(map),
            text,
            passed,
            seed: None,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }
}

pub fn canonical_json(value: &Value) -> String {
    // serde_json's default map is ordered by key, so this is canonical.
    serde_json::to_string(value).expect("values serialize")
}

pub fn digest(body: &Value) -> String {
    let hash = Sha256::digest(canonical_json(body).as_bytes());
    format!("sha256:{hash:x}")
}

pub fn manifest(command: &str, config: Vec<String>, arguments: Vec<String>, outcome: &Outcome) -> RunManifest {
    RunManifest {
        command: command.into(),
        config,
        arguments,
        seed: outcome.seed,
        version: VERSION.into(),
        digest: digest(&outcome.body),
    }
}

pub fn render(manifest: &RunManifest, outcome: &Outcome, format: Format) -> String {
    match format {
        Format::Json => {
            let envelope = serde_json::json!({
                "schema": SCHEMA,
                "manifest": manifest,
                "body": outcome.body,
            });
            let mut s = serde_json::to_string_pretty(&envelope).expect("values serialize");
            s.push('\n');
            s
        }
        Format::Text => {
            let mut s = outcome.text.clone();
            if !s.ends_with('\n') {
                s.push('\n');
            }
            let dash = |v: &[String]| if v.is_empty() { "-".to_string() } else { v.join(" ") };
            s.push_str(&format!("result: {}\n", if outcome.passed { "PASS" } else { "FAIL" }));
            s.push_str(&format!("-- manifest ({SCHEMA})\n"));
            s.push_str(&format!("command: {}\n", manifest.command));
            s.push_str(&format!("config: {}\n", dash(&manifest.config)));
            s.push_str(&format!("arguments: {}\n", dash(&manifest.arguments)));
            let seed = manifest.seed.map_or("-".to_string(), |v| v.to_string());
            s.push_str(&format!("seed: {seed}\n"));
            s.push_str(&format!("version: {}\n", manifest.version));
            s.push_str(&format!("digest: {}\n", manifest.digest));
            s
        }
    }
}

/// A float printed with enough digits to round-trip.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}
