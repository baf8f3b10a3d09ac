//! Output envelope shared by all commands.
//!
//! Coefficient and support indices are 1-based in every report; the library
//! works with 0-based indices.

use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use l1logit::Coefficients;
use serde::Serialize;

/// Bumped whenever a field changes meaning or disappears.
pub const SCHEMA_VERSION: u32 = 1;

/// Reproducibility record embedded in every report.
#[derive(Debug, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub tool_version: &'static str,
    pub command: &'static str,
    /// Every resolved parameter, defaults included.
    pub params: serde_json::Value,
    pub seed: Option<u64>,
    pub input: Option<String>,
    pub truth: Option<String>,
    pub output: Option<String>,
    /// Seconds since the epoch; `SOURCE_DATE_EPOCH` overrides the clock.
    pub timestamp_unix: u64,
}

impl Manifest {
    pub fn new(command: &'static str, params: impl Serialize) -> Self {
        Manifest {
            tool: "l1logit",
            tool_version: env!("CARGO_PKG_VERSION"),
            command,
            params: serde_json::to_value(params).unwrap_or(serde_json::Value::Null),
            seed: None,
            input: None,
            truth: None,
            output: None,
            timestamp_unix: timestamp(),
        }
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn input(mut self, path: &Path) -> Self {
        self.input = Some(path.display().to_string());
        self
    }

    pub fn truth(mut self, path: &Path) -> Self {
        self.truth = Some(path.display().to_string());
        self
    }

    pub fn output(mut self, path: Option<&Path>) -> Self {
        self.output = path.map(|p| p.display().to_string());
        self
    }
}

fn timestamp() -> u64 {
    if let Some(t) = std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|v| v.parse().ok())
    {
        return t;
    }
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_secs())
}

#[derive(Debug, Serialize)]
pub struct Report<T: Serialize> {
    pub schema_version: u32,
    pub manifest: Manifest,
    #[serde(flatten)]
    pub body: T,
}

impl<T: Serialize> Report<T> {
    pub fn new(manifest: Manifest, body: T) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            manifest,
            body,
        }
    }
}

/// One nonzero coefficient.
#[derive(Debug, Clone, Serialize)]
pub struct Entry {
    pub index: usize,
    pub value: f64,
}

pub fn sparse(coef: &Coefficients) -> Vec<Entry> {
    coef.beta
        .iter()
        .enumerate()
        .filter(|(_, v)| **v != 0.0)
        .map(|(j, &value)| Entry {
            index: j + 1,
            value,
        })
        .collect()
}

pub fn one_based(indices: &[usize]) -> Vec<usize> {
    indices.iter().map(|j| j + 1).collect()
}
