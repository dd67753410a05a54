use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("dump truncated at line {line}: {reason}")]
    TruncatedDump { line: usize, reason: String },

    #[error("malformed {what} at line {line}: {reason}")]
    Parse {
        what: &'static str,
        line: usize,
        reason: String,
    },

    #[error("http error: {0}")]
    Http(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("embedding provider failed on batch {batch}: {reason}")]
    EmbeddingBatch { batch: usize, reason: String },

    #[error("precomputed embeddings are missing doc ids {0:?}")]
    MissingEmbeddings(Vec<usize>),

    #[error("embedding dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("corpus too small for requested min_cluster_size ({n_rows} rows, min_cluster_size {min_cluster_size})")]
    CorpusTooSmall {
        n_rows: usize,
        min_cluster_size: usize,
    },

    #[error("missing artifact {artifact} for stage `{stage}`: run {upstream} first")]
    MissingArtifact {
        stage: &'static str,
        upstream: &'static str,
        artifact: String,
    },

    #[error("stale artifacts from stage(s) {0:?}; re-run them or pass --force")]
    StaleArtifacts(Vec<String>),

    #[error("work directory {0} is locked by another pipeline run")]
    Locked(PathBuf),

    #[error("configuration error: {0}")]
    Config(String),
}

impl From<reqwest::Error> for Error {
    fn from(err: reqwest::Error) -> Self {
        Error::Http(err.to_string())
    }
}
