//! Parameters come from flags first, then the `--config` JSON object, then
//! built-in defaults. Config keys are the flag names in snake case.

use serde::de::DeserializeOwned;
use serde_json::{Map, Value};
use std::path::Path;

use period_moments::numerics::Precision;

use crate::CliError;

#[derive(Debug, Default)]
pub struct Layers {
    file: Map<String, Value>,
    resolved: Map<String, Value>,
}

impl Layers {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        match serde_json::from_str(&text) {
            Ok(Value::Object(file)) => Ok(Self {
                file,
                resolved: Map::new(),
            }),
            Ok(_) => Err(CliError::Config("config must be a JSON object".into())),
            Err(e) => Err(CliError::Config(format!("config {}: {e}", path.display()))),
        }
    }

    /// Resolve one parameter and record it for the summary.
    pub fn get<T>(&mut self, key: &str, flag: Option<T>, default: T) -> Result<T, CliError>
    where
        T: DeserializeOwned + serde::Serialize,
    {
        let value = match flag {
            Some(v) => v,
            None => match self.file.get(key) {
                Some(v) => serde_json::from_value(v.clone())
                    .map_err(|e| CliError::Config(format!("config key {key}: {e}")))?,
                None => default,
            },
        };
        self.resolved.insert(
            key.to_string(),
            serde_json::to_value(&value).map_err(|e| CliError::Config(e.to_string()))?,
        );
        Ok(value)
    }

    /// Environment override first, then an explicit `working_digits` key.
    pub fn precision(&mut self) -> Result<Precision, CliError> {
        let mut p = Precision::from_env().map_err(|e| CliError::Config(e.to_string()))?;
        let digits = self.get("working_digits", None, p.working_digits)?;
        p.working_digits = digits;
        p.validate().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(p)
    }

    pub fn into_params(self) -> Value {
        Value::Object(self.resolved)
    }
}
