use serde::Serialize;
use serde_json::Value;
use std::path::Path;

use crate::CliError;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    /// a bound, or `[lo, hi]` for interval checks
    pub tolerance: Value,
    pub pass: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            value,
            tolerance: bound.into(),
            pass: value <= bound,
        }
    }

    pub fn at_least(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            value,
            tolerance: bound.into(),
            pass: value >= bound,
        }
    }

    pub fn within(name: impl Into<String>, value: f64, lo: f64, hi: f64) -> Self {
        Self {
            name: name.into(),
            value,
            tolerance: Value::from(vec![lo, hi]),
            pass: value >= lo && value <= hi,
        }
    }

    pub fn flag(name: impl Into<String>, value: f64, tolerance: f64, pass: bool) -> Self {
        Self {
            name: name.into(),
            value,
            tolerance: tolerance.into(),
            pass,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Summary {
    pub experiment: String,
    pub params: Value,
    pub checks: Vec<Check>,
    pub wall_time_s: f64,
}

impl Summary {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        let text =
            serde_json::to_string_pretty(self).map_err(|e| CliError::Config(e.to_string()))?;
        std::fs::write(path, text + "\n")
            .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))
    }
}

pub fn sci(v: f64) -> String {
    format!("{v:.16e}")
}
