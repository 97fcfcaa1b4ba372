use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::qd::EngineConfig;

use super::ExperimentError;

/// Where a labelled generator comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeneratorSource {
    Stub { label: String },
    Weights { label: String, manifest: PathBuf, blob: PathBuf },
}

impl GeneratorSource {
    pub fn label(&self) -> &str {
        match self {
            GeneratorSource::Stub { label } | GeneratorSource::Weights { label, .. } => label,
        }
    }
}

/// A full experiment: each generator is evolved `runs` times; run `r` uses
/// seed `seed + r`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub generators: Vec<GeneratorSource>,
    pub runs: usize,
    pub seed: u64,
    pub output_dir: PathBuf,
    #[serde(flatten)]
    pub engine: EngineConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            generators: vec![GeneratorSource::Stub { label: "stub".into() }],
            runs: 30,
            seed: 0,
            output_dir: PathBuf::from("results"),
            engine: EngineConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), ExperimentError> {
        if self.runs == 0 {
            return Err(ExperimentError::InvalidConfig("runs must be at least 1".into()));
        }
        if self.generators.is_empty() {
            return Err(ExperimentError::InvalidConfig("no generators configured".into()));
        }
        let mut labels: Vec<&str> = self.generators.iter().map(GeneratorSource::label).collect();
        labels.sort_unstable();
        if labels.windows(2).any(|w| w[0] == w[1]) {
            return Err(ExperimentError::InvalidConfig("generator labels must be unique".into()));
        }
        if labels.iter().any(|l| l.is_empty() || l.contains(['/', '\\'])) {
            return Err(ExperimentError::InvalidConfig("generator labels must be plain names".into()));
        }
        self.engine.validate()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_config_with_defaults() {
        let text = r#"{
            "runs": 3,
            "total_evals": 2000,
            "generators": [
                {"kind": "stub", "label": "stub"},
                {"kind": "weights", "label": "On5Levels", "manifest": "g/manifest.json", "blob": "g/weights.bin"}
            ]
        }"#;
        let config: ExperimentConfig = serde_json::from_str(text).unwrap();
        assert_eq!(config.runs, 3);
        assert_eq!(config.engine.total_evals, 2000);
        assert_eq!(config.engine.init_size, 100);
        assert_eq!(config.generators[1].label(), "On5Levels");
        config.validate().unwrap();
    }

    #[test]
    fn rejects_bad_values() {
        let config = ExperimentConfig { runs: 0, ..Default::default() };
        assert!(config.validate().is_err());
        let mut config = ExperimentConfig::default();
        config.generators.push(GeneratorSource::Stub { label: "stub".into() });
        assert!(config.validate().is_err());
        let mut config = ExperimentConfig::default();
        config.engine.total_evals = 10;
        assert!(config.validate().is_err());
    }
}
