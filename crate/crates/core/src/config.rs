//! Run configuration: a TOML file whose relative paths resolve against the
//! file's own directory, with command-line overrides applied on top.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::corpus::CorpusConfig;
use crate::embeddings::EmbeddingFormat;
use crate::error::{Error, Result};
use crate::models::{KmeansConfig, ModelConfig};
use crate::ontology::AggregationMethod;
use crate::pipeline::Params;

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub embeddings: Option<PathBuf>,
    pub embedding_format: EmbeddingFormat,
    pub ontology: Option<PathBuf>,
    pub corpus: Option<PathBuf>,
    pub taxonomy: Option<PathBuf>,
    pub gold: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub min_count: usize,
    pub lowercase: bool,
    pub kmeans_seed: u64,
    pub max_iters: usize,
    pub min_seeds: usize,
    pub split_seed: u64,
    pub threshold: f64,
    pub tune_threshold: bool,
    pub weights: Option<Vec<f64>>,
    pub class_vector_method: AggregationMethod,
}

impl Default for RunConfig {
    fn default() -> Self {
        let params = Params::default();
        RunConfig {
            embeddings: None,
            embedding_format: EmbeddingFormat::Auto,
            ontology: None,
            corpus: None,
            taxonomy: None,
            gold: None,
            output: None,
            min_count: params.corpus.min_count,
            lowercase: params.corpus.lowercase,
            kmeans_seed: params.models.kmeans.seed,
            max_iters: params.models.kmeans.max_iters,
            min_seeds: params.models.min_seeds,
            split_seed: params.split_seed,
            threshold: params.threshold,
            tune_threshold: params.tune_threshold,
            weights: None,
            class_vector_method: params.method,
        }
    }
}

fn resolve(base: &Path, path: &mut Option<PathBuf>) {
    if let Some(p) = path {
        if p.is_relative() {
            *p = base.join(&*p);
        }
    }
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut config = Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        for p in [
            &mut config.embeddings,
            &mut config.ontology,
            &mut config.corpus,
            &mut config.taxonomy,
            &mut config.gold,
            &mut config.output,
        ] {
            resolve(base, p);
        }
        Ok(config)
    }

    /// The path stored under `key`, or a configuration error naming it.
    pub fn require<'a>(&self, key: &str, value: &'a Option<PathBuf>) -> Result<&'a Path> {
        value
            .as_deref()
            .ok_or_else(|| Error::Config(format!("`{key}` is not set (config file or --{key})")))
    }

    /// Checks that every configured input path exists.
    pub fn check_paths(&self) -> Result<()> {
        let inputs = [
            ("embeddings", &self.embeddings, false),
            ("ontology", &self.ontology, false),
            ("corpus", &self.corpus, true),
            ("taxonomy", &self.taxonomy, false),
            ("gold", &self.gold, false),
        ];
        for (key, path, dir) in inputs {
            let Some(path) = path else { continue };
            let ok = if dir { path.is_dir() } else { path.is_file() };
            if !ok {
                return Err(Error::Config(format!(
                    "{key} {} `{}` does not exist",
                    if dir { "directory" } else { "file" },
                    path.display()
                )));
            }
        }
        Ok(())
    }

    pub fn params(&self) -> Result<Params> {
        if let Some(w) = &self.weights {
            if w.iter().any(|x| !x.is_finite() || *x < 0.0) {
                return Err(Error::Config(format!(
                    "weights must be non-negative, got {w:?}"
                )));
            }
        }
        Ok(Params {
            corpus: CorpusConfig {
                min_count: self.min_count,
                lowercase: self.lowercase,
            },
            method: self.class_vector_method,
            models: ModelConfig {
                kmeans: KmeansConfig {
                    seed: self.kmeans_seed,
                    max_iters: self.max_iters,
                },
                min_seeds: self.min_seeds,
            },
            split_seed: self.split_seed,
            threshold: self.threshold,
            tune_threshold: self.tune_threshold,
            weights: self.weights.clone(),
            ..Params::default()
        })
    }
}
