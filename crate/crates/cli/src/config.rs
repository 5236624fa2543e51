use std::path::Path;

use serde::Deserialize;

use crate::CliError;

/// Optional TOML config. Every field may be omitted; CLI flags win over it,
/// and it wins over built-in defaults.
#[derive(Debug, Default, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(default)]
    pub kernel: KernelSection,
    #[serde(default)]
    pub subgraph: SubgraphSection,
    #[serde(default)]
    pub propagation: PropagationSection,
}

#[derive(Debug, Default, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelSection {
    pub theta: Option<u64>,
    pub sigma: Option<f64>,
}

#[derive(Debug, Default, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubgraphSection {
    pub roots: Option<usize>,
    pub depth: Option<usize>,
    pub enabled: Option<bool>,
}

#[derive(Debug, Default, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropagationSection {
    pub alpha: Option<f64>,
    pub gamma: Option<f64>,
    pub iters: Option<usize>,
    pub tolerance: Option<f64>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(FileConfig::default());
        };
        let text = std::fs::read_to_string(path).map_err(relprop::Error::from)?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }
}
