//! Run configuration: the single hashable description of an experiment.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::dynamics::DEFAULT_DT;
use crate::evaluation::QuantizationSet;
use crate::forest::ForestConfig;
use crate::grid::GridSpec;
use crate::hypotheses::HypothesisConfig;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridFormat {
    Text,
    Binary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub grid: GridSpec,
    /// Prediction times [s], strictly increasing.
    pub instances: Vec<f64>,
    pub hypotheses: HypothesisConfig,
    pub forest: ForestConfig,
    pub quantization: QuantizationSet,
    /// Fraction of scenes assigned to training.
    pub train_fraction: f64,
    pub seed: u64,
    pub grid_format: GridFormat,
    pub benchmark_reps: usize,
}

impl Default for RunConfig {
    /// 80 x 80 cells of 0.5 m covering the built-in intersection.
    fn default() -> Self {
        Self {
            grid: GridSpec {
                origin: [0.0, -15.0],
                cell_length: 0.5,
                cell_width: 0.5,
                cols: 80,
                rows: 80,
            },
            instances: vec![0.5, 1.0, 2.0],
            hypotheses: HypothesisConfig::default(),
            forest: ForestConfig::default(),
            quantization: QuantizationSet::default(),
            train_fraction: 2.0 / 3.0,
            seed: 0,
            grid_format: GridFormat::Binary,
            benchmark_reps: 10,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        let increasing = self.instances.windows(2).all(|w| w[0] < w[1]);
        if self.instances.is_empty() || !increasing || !(self.instances[0] > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "instances must be positive and strictly increasing, got {:?}",
                self.instances
            )));
        }
        if self.instances.iter().any(|t| !t.is_finite() || *t > 60.0) {
            return Err(Error::InvalidParameter(
                "prediction times must be finite and at most 60 s".into(),
            ));
        }
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "train_fraction must lie in (0, 1), got {}",
                self.train_fraction
            )));
        }
        if self.benchmark_reps < 10 {
            return Err(Error::InvalidParameter(
                "benchmark_reps must be at least 10".into(),
            ));
        }
        self.hypotheses.validate()?;
        self.forest.validate()
    }

    /// Simulation horizon covering the last instance, on the integration grid.
    pub fn horizon(&self) -> f64 {
        let last = self.instances.last().copied().unwrap_or(0.0);
        (last / DEFAULT_DT - 1e-9).ceil() * DEFAULT_DT
    }

    pub fn from_toml(text: &str, context: &str) -> Result<Self> {
        let config: RunConfig =
            toml::from_str(text).map_err(|e| Error::format(context, e.to_string()))?;
        config
            .validate()
            .map_err(|e| Error::InvalidParameter(format!("{context}: {e}")))?;
        Ok(config)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes to TOML")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text, &path.display().to_string())
    }

    /// SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("config serializes to JSON");
        hex::encode(Sha256::digest(&json))
    }
}
