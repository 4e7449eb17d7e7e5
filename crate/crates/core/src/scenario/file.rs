use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Scene, SweepSpec};
use crate::{Error, Result};

pub const SCENARIO_SCHEMA_VERSION: u32 = 1;

/// Scenario file: a base scene and an optional sweep, stored as TOML.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioFile {
    pub schema_version: u32,
    pub scene: Scene,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
}

impl ScenarioFile {
    pub fn from_toml(text: &str, context: &str) -> Result<Self> {
        let file: ScenarioFile =
            toml::from_str(text).map_err(|e| Error::format(context, e.to_string()))?;
        if file.schema_version != SCENARIO_SCHEMA_VERSION {
            return Err(Error::format(
                context,
                format!(
                    "unsupported schema_version {} (expected {SCENARIO_SCHEMA_VERSION})",
                    file.schema_version
                ),
            ));
        }
        file.scene
            .validate()
            .map_err(|e| Error::format(context, e.to_string()))?;
        if let Some(sweep) = &file.sweep {
            sweep
                .validate(&file.scene)
                .map_err(|e| Error::format(context, e.to_string()))?;
        }
        Ok(file)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario serializes to TOML")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text, &path.display().to_string())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_toml()).map_err(|e| Error::io(path, e))
    }
}
