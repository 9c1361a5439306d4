use std::fs;
use std::path::Path;

use certlab::harness::{BipartiteConfig, ScoreWeights};
use certlab::involutions::Exp1Config;
use certlab::planar::PlanarConfig;
use certlab::rota::FitnessWeights;
use serde::Deserialize;

use crate::Failure;

/// Optional settings file. Command-line flags take precedence.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub score_weights: Option<ScoreWeights>,
    pub fitness_weights: Option<FitnessWeights>,
    pub bipartite: Option<BipartiteConfig>,
    pub planar: Option<PlanarConfig>,
    pub exp1: Option<Exp1Config>,
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, Failure> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
        let config: Self = serde_json::from_str(&text)
            .map_err(|e| Failure::Usage(format!("bad config {}: {e}", path.display())))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), Failure> {
        let usage = |e: certlab::Error| Failure::Usage(e.to_string());
        if let Some(w) = &self.score_weights {
            w.validate().map_err(usage)?;
        }
        if let Some(w) = &self.fitness_weights {
            w.validate().map_err(usage)?;
        }
        if self.threads == Some(0) {
            return Err(Failure::Usage("threads must be positive".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(serde_json::from_str::<RunConfig>(r#"{"seed": 3, "sead": 4}"#).is_err());
        let c: RunConfig = serde_json::from_str(
            r#"{"score_weights": {"deck": 0.8, "degree": 0.1, "edges": 0.1}}"#,
        )
        .unwrap();
        assert!(c.validate().is_ok());
        let bad: RunConfig = serde_json::from_str(
            r#"{"score_weights": {"deck": 0.2, "degree": 0.4, "edges": 0.4}}"#,
        )
        .unwrap();
        assert!(bad.validate().is_err());
    }
}
