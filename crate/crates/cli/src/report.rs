//! The JSON report shared by every subcommand.

use std::path::PathBuf;

use bcontact::GridConfig;
use serde::Serialize;
use serde_json::{Map, Value};

/// Sampling settings and output path, echoed into every report.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub grid_off_z: usize,
    pub grid_on_z: usize,
    pub tol: f64,
    pub seed: u64,
    pub z_margin: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn grid(&self) -> GridConfig {
        GridConfig {
            off_z: self.grid_off_z,
            on_z: self.grid_on_z,
            seed: self.seed,
            z_margin: self.z_margin,
            tol: self.tol,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub config: RunConfig,
    pub inputs: Map<String, Value>,
    pub verdict: String,
    pub passed: bool,
    pub metrics: Map<String, Value>,
    pub witnesses: Vec<Value>,
    pub artifacts: Map<String, Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<String>,
}

impl Report {
    pub fn new(command: &str, config: RunConfig) -> Report {
        Report {
            command: command.to_string(),
            config,
            inputs: Map::new(),
            verdict: String::new(),
            passed: false,
            metrics: Map::new(),
            witnesses: Vec::new(),
            artifacts: Map::new(),
            timestamp: None,
        }
    }

    pub fn input(&mut self, key: &str, v: impl Serialize) -> &mut Self {
        self.inputs.insert(key.into(), to_value(v));
        self
    }

    pub fn metric(&mut self, key: &str, v: impl Serialize) -> &mut Self {
        self.metrics.insert(key.into(), to_value(v));
        self
    }

    pub fn artifact(&mut self, key: &str, v: impl Serialize) -> &mut Self {
        self.artifacts.insert(key.into(), to_value(v));
        self
    }

    pub fn witness(&mut self, v: impl Serialize) -> &mut Self {
        self.witnesses.push(to_value(v));
        self
    }

    pub fn verdict(&mut self, verdict: impl Into<String>, passed: bool) -> &mut Self {
        self.verdict = verdict.into();
        self.passed = passed;
        self
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Non-finite floats serialize as `null`.
pub fn to_value(v: impl Serialize) -> Value {
    serde_json::to_value(v).unwrap_or_else(|e| Value::String(format!("unserializable: {e}")))
}

/// Serde label of a unit enum variant.
pub fn label(v: impl Serialize) -> String {
    match to_value(v) {
        Value::String(s) => s,
        other => other.to_string(),
    }
}
