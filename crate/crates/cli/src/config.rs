//! Pipeline configuration: one TOML file, every key overridable by a flag.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use lscsim_core::SplitConfig;
use lscsim_embeddings::{Alignment, Measure, Model, ModelGridSpec, SgnsConfig};

use crate::InputError;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    /// Sense-annotated corpus (TSV token format).
    pub input: Option<PathBuf>,
    /// Directory receiving every artifact.
    pub out: PathBuf,
    pub seed: u64,
    /// Worker threads for independent grid jobs.
    pub jobs: usize,
    pub split: SplitSection,
    pub grid: GridSection,
    pub sgns: SgnsSection,
    pub evaluation: EvaluationSection,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SplitSection {
    pub target_min: usize,
    pub target_max: usize,
    pub k: f64,
    pub re_max: f64,
    pub min_freq: u64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSection {
    pub models: Vec<String>,
    pub alignments: Vec<String>,
    pub measures: Vec<String>,
    pub dims: Vec<usize>,
    pub iterations: usize,
    pub window: usize,
    pub k_nn: usize,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SgnsSection {
    pub epochs: usize,
    pub negatives: usize,
    pub learning_rate: f64,
    pub noise_exponent: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvaluationSection {
    /// Monte-Carlo trials of the random baseline.
    pub trials: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            input: None,
            out: PathBuf::from("lscsim-out"),
            seed: 0,
            jobs: 1,
            split: SplitSection::default(),
            grid: GridSection::default(),
            sgns: SgnsSection::default(),
            evaluation: EvaluationSection::default(),
        }
    }
}

impl Default for SplitSection {
    fn default() -> Self {
        let d = SplitConfig::default();
        SplitSection {
            target_min: d.target_freq_min,
            target_max: d.target_freq_max,
            k: d.binary_k,
            re_max: d.re_max,
            min_freq: d.testset_freq_min,
        }
    }
}

impl Default for GridSection {
    fn default() -> Self {
        let d = ModelGridSpec::default();
        GridSection {
            models: d.models.iter().map(|m| m.to_string()).collect(),
            alignments: d.alignments.iter().map(|a| a.to_string()).collect(),
            measures: d.measures.iter().map(|m| m.to_string()).collect(),
            dims: d.dims,
            iterations: d.iterations,
            window: d.window,
            k_nn: d.k_nn,
        }
    }
}

impl Default for SgnsSection {
    fn default() -> Self {
        let d = SgnsConfig::default();
        SgnsSection {
            epochs: d.epochs,
            negatives: d.negatives,
            learning_rate: d.learning_rate,
            noise_exponent: d.noise_exponent,
        }
    }
}

impl Default for EvaluationSection {
    fn default() -> Self {
        EvaluationSection { trials: 10_000 }
    }
}

fn parse_list<T: std::str::FromStr<Err = lscsim_embeddings::EmbedError>>(
    names: &[String],
) -> Result<Vec<T>, InputError> {
    names
        .iter()
        .map(|n| n.parse().map_err(|e: lscsim_embeddings::EmbedError| InputError(e.to_string())))
        .collect()
}

impl PipelineConfig {
    /// Reads a config file. Relative paths inside it are taken relative to
    /// the file's directory.
    pub fn load(path: &Path) -> Result<Self, InputError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| InputError(format!("cannot read config {}: {e}", path.display())))?;
        let mut config: PipelineConfig =
            toml::from_str(&text).map_err(|e| InputError(format!("invalid config {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        if let Some(input) = &config.input {
            config.input = Some(base.join(input));
        }
        config.out = base.join(&config.out);
        Ok(config)
    }

    pub fn split_config(&self) -> Result<SplitConfig, InputError> {
        let s = &self.split;
        let config = SplitConfig {
            seed: self.seed,
            target_freq_min: s.target_min,
            target_freq_max: s.target_max,
            binary_k: s.k,
            re_max: s.re_max,
            testset_freq_min: s.min_freq,
        };
        config.validate().map_err(|e| InputError(e.to_string()))?;
        Ok(config)
    }

    pub fn grid_spec(&self) -> Result<ModelGridSpec, InputError> {
        let g = &self.grid;
        let spec = ModelGridSpec {
            models: parse_list::<Model>(&g.models)?,
            alignments: parse_list::<Alignment>(&g.alignments)?,
            measures: parse_list::<Measure>(&g.measures)?,
            dims: g.dims.clone(),
            iterations: g.iterations,
            window: g.window,
            k_nn: g.k_nn,
            sgns: SgnsConfig {
                window: g.window,
                epochs: self.sgns.epochs,
                negatives: self.sgns.negatives,
                learning_rate: self.sgns.learning_rate,
                noise_exponent: self.sgns.noise_exponent,
                ..SgnsConfig::default()
            },
            seed: self.seed,
        };
        spec.validate().map_err(|e| InputError(e.to_string()))?;
        Ok(spec)
    }
}
