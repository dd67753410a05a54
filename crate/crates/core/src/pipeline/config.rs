use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::clustering::HdbscanParams;
use crate::corpus::{ApiClientConfig, DateWindow};
use crate::embedding::EmbeddingProviderConfig;
use crate::reduction::UmapParams;
use crate::summarize::SummaryParams;
use crate::topics::TopicParams;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClusterSpace {
    /// Cluster the UMAP output.
    #[default]
    Reduced,
    /// Cluster the embeddings directly.
    Original,
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

fn default_tag() -> String {
    "android".into()
}

/// Everything a pipeline run needs. Loaded from a JSON file with command
/// line overrides applied on top; only `seed` is mandatory.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    /// `Posts.xml` data dump to ingest.
    #[serde(default)]
    pub corpus: Option<PathBuf>,
    /// Fetch from the Stack Exchange API instead of a dump.
    #[serde(default)]
    pub api: Option<ApiClientConfig>,
    /// Directory receiving every artifact and the manifest.
    #[serde(default = "default_out")]
    pub out: PathBuf,
    #[serde(default = "default_tag")]
    pub tag: String,
    /// `YYYY-MM` or `YYYY-MM-DD`; defaults to the start of 2009.
    #[serde(default)]
    pub from: Option<String>,
    /// `YYYY-MM` or `YYYY-MM-DD`; defaults to the end of April 2023.
    #[serde(default)]
    pub to: Option<String>,
    #[serde(default)]
    pub embedding: EmbeddingProviderConfig,
    #[serde(default)]
    pub umap: UmapParams,
    #[serde(default)]
    pub hdbscan: HdbscanParams,
    #[serde(default)]
    pub topics: TopicParams,
    #[serde(default)]
    pub summary: SummaryParams,
    #[serde(default)]
    pub cluster_space: ClusterSpace,
    /// Seeds UMAP and the summarizer; overrides their own `seed` fields.
    pub seed: u64,
}

impl PipelineConfig {
    /// Minimal configuration for a dump-based run.
    pub fn new(corpus: impl Into<PathBuf>, out: impl Into<PathBuf>, seed: u64) -> Self {
        let mut cfg: Self = serde_json::from_value(serde_json::json!({ "seed": seed }))
            .expect("seed-only config is valid");
        cfg.corpus = Some(corpus.into());
        cfg.out = out.into();
        cfg.apply_seed();
        cfg
    }

    /// Read `path` (if given), deep-merge `overrides` into it and validate.
    pub fn load(path: Option<&Path>, overrides: Value) -> Result<Self> {
        let mut base = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| Error::Config(format!("cannot read {}: {e}", p.display())))?;
                serde_json::from_str(&text)
                    .map_err(|e| Error::Config(format!("{}: {e}", p.display())))?
            }
            None => Value::Object(Default::default()),
        };
        merge(&mut base, overrides);
        if base.get("seed").is_none_or(Value::is_null) {
            return Err(Error::Config(
                "a seed is required: set \"seed\" in the config file or pass --seed".into(),
            ));
        }
        let mut cfg: Self =
            serde_json::from_value(base).map_err(|e| Error::Config(e.to_string()))?;
        cfg.apply_seed();
        cfg.validate()?;
        Ok(cfg)
    }

    fn apply_seed(&mut self) {
        self.umap.seed = self.seed;
        self.summary.seed = self.seed;
    }

    pub fn window(&self) -> Result<DateWindow> {
        let default = DateWindow::default();
        let from = match &self.from {
            Some(s) => DateWindow::parse_bound(s, false)?,
            None => default.from,
        };
        let to = match &self.to {
            Some(s) => DateWindow::parse_bound(s, true)?,
            None => default.to,
        };
        DateWindow::new(from, to)
    }

    pub fn validate(&self) -> Result<()> {
        self.window()?;
        self.embedding.validate()?;
        self.umap.validate()?;
        self.hdbscan.validate()?;
        if self.corpus.is_some() && self.api.is_some() {
            return Err(Error::Config(
                "choose either a dump (corpus) or the API, not both".into(),
            ));
        }
        Ok(())
    }
}

/// Recursively merge `patch` into `base`; non-object values replace.
pub fn merge(base: &mut Value, patch: Value) {
    match (base, patch) {
        (Value::Object(b), Value::Object(p)) => {
            for (k, v) in p {
                match b.get_mut(&k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}
