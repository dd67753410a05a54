//! Document embeddings behind a pluggable provider.

mod hashed;
mod remote;

use std::collections::BTreeMap;
use std::io::BufRead;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};

pub use hashed::{hashed_tfidf_embed, term_bucket, MIN_HASHED_DIM};
pub use remote::RemoteEmbedder;

use crate::corpus::{Sleeper, ThreadSleeper};
use crate::matrix::{parse_row_line, MatrixView};
use crate::text::CleanDocument;
use crate::{Error, Result};

/// One row per document, row `i` belonging to `doc_id` `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    pub n_rows: usize,
    pub dim: usize,
    /// Row-major.
    pub values: Vec<f64>,
    /// Rows left all-zero because their document had no tokens.
    pub zero_rows: Vec<usize>,
}

impl EmbeddingMatrix {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let (n_rows, dim, values) = crate::matrix::flatten_rows(rows)?;
        Ok(Self::from_values(n_rows, dim, values))
    }

    pub fn from_values(n_rows: usize, dim: usize, values: Vec<f64>) -> Self {
        let zero_rows = (0..n_rows)
            .filter(|&i| values[i * dim..(i + 1) * dim].iter().all(|v| *v == 0.0))
            .collect();
        Self {
            n_rows,
            dim,
            values,
            zero_rows,
        }
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    pub fn view(&self) -> MatrixView<'_> {
        MatrixView::new(self.n_rows, self.dim, &self.values).expect("consistent shape")
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        crate::matrix::save_matrix(path, self.view())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let (n, dim, values) = crate::matrix::load_matrix(path)?;
        Ok(Self::from_values(n, dim, values))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProviderKind {
    HashedTfidf,
    PrecomputedFile,
    RemoteHttp,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EmbeddingProviderConfig {
    pub kind: ProviderKind,
    /// Bucket count of the hashed baseline.
    pub dim: usize,
    /// Base URL of a remote embedding server.
    pub endpoint: Option<String>,
    /// `doc_id TAB v1,v2,...` file for the precomputed provider.
    pub path: Option<PathBuf>,
    pub batch_size: usize,
    pub max_retries: u32,
    pub timeout_secs: u64,
}

impl Default for EmbeddingProviderConfig {
    fn default() -> Self {
        Self {
            kind: ProviderKind::HashedTfidf,
            dim: 256,
            endpoint: None,
            path: None,
            batch_size: 32,
            max_retries: 3,
            timeout_secs: 60,
        }
    }
}

impl EmbeddingProviderConfig {
    pub fn validate(&self) -> Result<()> {
        if self.batch_size == 0 {
            return Err(Error::Config(
                "embedding batch_size must be positive".into(),
            ));
        }
        match self.kind {
            ProviderKind::HashedTfidf if self.dim < MIN_HASHED_DIM => Err(Error::Config(format!(
                "hashed embedding dim must be >= {MIN_HASHED_DIM}"
            ))),
            ProviderKind::RemoteHttp if self.endpoint.is_none() => Err(Error::Config(
                "remote_http embedding requires an endpoint".into(),
            )),
            ProviderKind::PrecomputedFile if self.path.is_none() => Err(Error::Config(
                "precomputed_file embedding requires a path".into(),
            )),
            _ => Ok(()),
        }
    }

    pub fn remote_embedder(&self) -> Result<RemoteEmbedder> {
        let endpoint = self
            .endpoint
            .as_deref()
            .ok_or_else(|| Error::Config("remote_http embedding requires an endpoint".into()))?;
        RemoteEmbedder::new(
            endpoint,
            self.batch_size,
            self.max_retries,
            Duration::from_secs(self.timeout_secs),
        )
    }
}

/// Embed every document with the configured provider.
pub fn embed_corpus(
    documents: &[CleanDocument],
    config: &EmbeddingProviderConfig,
) -> Result<EmbeddingMatrix> {
    embed_corpus_with(documents, config, &ThreadSleeper)
}

pub fn embed_corpus_with(
    documents: &[CleanDocument],
    config: &EmbeddingProviderConfig,
    sleeper: &dyn Sleeper,
) -> Result<EmbeddingMatrix> {
    config.validate()?;
    for (i, doc) in documents.iter().enumerate() {
        if doc.doc_id != i {
            return Err(Error::InvalidInput(format!(
                "documents out of order: position {i} holds doc_id {}",
                doc.doc_id
            )));
        }
    }
    match config.kind {
        ProviderKind::HashedTfidf => {
            let tokens: Vec<&Vec<String>> = documents.iter().map(|d| &d.tokens).collect();
            hashed_tfidf_embed(&tokens, config.dim)
        }
        ProviderKind::PrecomputedFile => {
            let path = config.path.as_deref().expect("validated");
            let file = std::fs::File::open(path)?;
            read_precomputed(std::io::BufReader::new(file), documents.len())
        }
        ProviderKind::RemoteHttp => {
            let texts: Vec<String> = documents
                .iter()
                .map(CleanDocument::embedding_text)
                .collect();
            let vectors = config.remote_embedder()?.embed_texts(&texts, sleeper)?;
            if vectors.is_empty() {
                return Ok(EmbeddingMatrix::from_values(0, 0, Vec::new()));
            }
            EmbeddingMatrix::from_rows(&vectors)
        }
    }
}

/// Read `doc_id TAB v1,v2,...` lines (an optional `n dim` header is skipped)
/// and require exactly the ids `0..n_docs`.
pub fn read_precomputed<R: BufRead>(input: R, n_docs: usize) -> Result<EmbeddingMatrix> {
    let mut rows: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    let mut dim = None;
    for (idx, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() || (idx == 0 && !line.contains('\t')) {
            continue;
        }
        let (id, values) = parse_row_line(&line, idx + 1)?;
        let expected = *dim.get_or_insert(values.len());
        if values.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Parse {
                what: "precomputed embedding",
                line: idx + 1,
                reason: "non-finite value".into(),
            });
        }
        if id < n_docs {
            rows.insert(id, values);
        }
    }
    let missing: Vec<usize> = (0..n_docs).filter(|i| !rows.contains_key(i)).collect();
    if !missing.is_empty() {
        return Err(Error::MissingEmbeddings(missing));
    }
    let dim = dim.unwrap_or(0);
    let values = rows.into_values().flatten().collect();
    Ok(EmbeddingMatrix::from_values(n_docs, dim, values))
}
