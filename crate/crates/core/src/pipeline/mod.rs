//! Resumable, cached pipeline over an output directory.
//!
//! Every stage reads the artifacts of its upstream stages from `<out>/`,
//! writes its own atomically, and records input and output hashes in
//! `<out>/manifest.json`. A stage whose configuration and inputs are
//! unchanged is skipped.

mod config;
mod manifest;

use std::collections::BTreeMap;
use std::fmt;
use std::fs::{self, File};
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use log::{info, warn};
use serde::Serialize;
use serde_json::{json, Value};

pub use config::{merge, ClusterSpace, PipelineConfig};
pub use manifest::{DirLock, Manifest, RunKind, StageRecord};

use crate::clustering::{hdbscan_fit, ClusterAssignment};
use crate::corpus::{
    fetch_api_pages, filter_corpus, CorpusStore, DumpReader, FetchStatus, RawPost, ThreadSleeper,
};
use crate::embedding::{embed_corpus, EmbeddingMatrix, ProviderKind, MIN_HASHED_DIM};
use crate::matrix::MatrixView;
use crate::plot::save_wordscore_svg;
use crate::reduction::{umap_reduce, ReducedEmbedding};
use crate::summarize::{
    assemble_reports, render_markdown, write_json, HashedSentenceEmbedder, RemoteSentenceEmbedder,
    SentenceEmbedder, TopicReport,
};
use crate::text::{prepare_documents, CleanDocument, Normalizer};
use crate::topics::{
    build_topics, export_word_scores, load_topics, read_word_scores_csv, save_topics,
    save_word_scores,
};
use crate::util::{hash_file, sha256_hex, write_atomic};
use crate::{Error, Result};

pub const CORPUS_FILE: &str = "corpus.ndjson";
pub const INGEST_REPORT_FILE: &str = "ingest_report.json";
pub const DOCS_FILE: &str = "docs.ndjson";
pub const EMBEDDINGS_FILE: &str = "embeddings.txt";
pub const REDUCED_FILE: &str = "reduced.txt";
pub const ASSIGNMENT_FILE: &str = "assignment.tsv";
pub const TOPICS_FILE: &str = "topics.json";
pub const WORDSCORES_FILE: &str = "wordscores.csv";
pub const WORDSCORES_SVG: &str = "wordscores.svg";
pub const REPORTS_DIR: &str = "reports";
pub const MANIFEST_FILE: &str = "manifest.json";

/// Topics and terms per topic in the word-score table.
const WORDSCORE_TOPICS: usize = 12;
const WORDSCORE_TERMS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Stage {
    Ingest,
    Prep,
    Embed,
    Reduce,
    Cluster,
    Topics,
    Summarize,
    Report,
}

impl Stage {
    pub const ALL: [Stage; 8] = [
        Stage::Ingest,
        Stage::Prep,
        Stage::Embed,
        Stage::Reduce,
        Stage::Cluster,
        Stage::Topics,
        Stage::Summarize,
        Stage::Report,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Ingest => "ingest",
            Stage::Prep => "prep",
            Stage::Embed => "embed",
            Stage::Reduce => "reduce",
            Stage::Cluster => "cluster",
            Stage::Topics => "topics",
            Stage::Summarize => "summarize",
            Stage::Report => "report",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for Stage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Stage::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown stage {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StageOutcome {
    pub stage: Stage,
    pub run: RunKind,
    /// Output files relative to the output directory.
    pub outputs: Vec<String>,
}

/// An input of a stage: an artifact of another stage, or a user file.
enum Input {
    Artifact { producer: Stage, rel: String },
    External { role: &'static str, path: PathBuf },
}

/// Summary written next to the corpus by `ingest`.
#[derive(Debug, Serialize)]
struct IngestReport {
    source: String,
    lines_read: usize,
    posts_parsed: usize,
    malformed_rows: Vec<crate::corpus::LedgerEntry>,
    truncated: bool,
    api_status: Option<String>,
    kept_questions: usize,
    kept_answers: usize,
    dropped_questions: usize,
    dropped_answers: usize,
    orphan_answers: usize,
}

/// A locked output directory plus its manifest.
pub struct Pipeline {
    config: PipelineConfig,
    out: PathBuf,
    manifest: Manifest,
    _lock: DirLock,
}

impl Pipeline {
    /// Validate the configuration, lock `config.out` and load its manifest.
    pub fn open(config: PipelineConfig) -> Result<Self> {
        config.validate()?;
        let out = config.out.clone();
        let lock = DirLock::acquire(&out)?;
        let manifest = Manifest::load(&out.join(MANIFEST_FILE))?;
        Ok(Self {
            config,
            out,
            manifest,
            _lock: lock,
        })
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.config
    }

    pub fn out_dir(&self) -> &Path {
        &self.out
    }

    pub fn manifest(&self) -> &Manifest {
        &self.manifest
    }

    /// Run every stage in order.
    pub fn run_all(&mut self, force: bool) -> Result<Vec<StageOutcome>> {
        Stage::ALL
            .into_iter()
            .map(|s| self.run_stage(s, force))
            .collect()
    }

    /// Run one stage. Without `force`, stale upstream artifacts are an error
    /// and an up-to-date stage is a cache hit; `force` skips both checks.
    pub fn run_stage(&mut self, stage: Stage, force: bool) -> Result<StageOutcome> {
        let (fingerprint, inputs) = self.fingerprint(stage)?;
        if !force {
            let stale = self.stale_upstreams(stage);
            if !stale.is_empty() {
                return Err(Error::StaleArtifacts(stale));
            }
            if let Some(record) = self.manifest.stages.get(stage.name()) {
                if record.fingerprint == fingerprint && self.outputs_intact(record) {
                    info!("{stage}: up to date, skipping");
                    let outputs = record.outputs.keys().cloned().collect();
                    self.record(
                        stage,
                        fingerprint,
                        inputs,
                        record.outputs.clone(),
                        RunKind::CacheHit,
                    )?;
                    return Ok(StageOutcome {
                        stage,
                        run: RunKind::CacheHit,
                        outputs,
                    });
                }
            }
        }
        info!("{stage}: running");
        let produced = self.execute(stage)?;
        let mut outputs = BTreeMap::new();
        for rel in &produced {
            outputs.insert(rel.clone(), hash_file(&self.out.join(rel))?);
        }
        self.record(stage, fingerprint, inputs, outputs, RunKind::Executed)?;
        Ok(StageOutcome {
            stage,
            run: RunKind::Executed,
            outputs: produced,
        })
    }

    fn record(
        &mut self,
        stage: Stage,
        fingerprint: String,
        inputs: BTreeMap<String, String>,
        outputs: BTreeMap<String, String>,
        last_run: RunKind,
    ) -> Result<()> {
        self.manifest.stages.insert(
            stage.name().to_string(),
            StageRecord {
                fingerprint,
                inputs,
                outputs,
                last_run,
            },
        );
        self.manifest.save(&self.out.join(MANIFEST_FILE))
    }

    fn outputs_intact(&self, record: &StageRecord) -> bool {
        record
            .outputs
            .iter()
            .all(|(rel, hash)| hash_file(&self.out.join(rel)).is_ok_and(|h| h == *hash))
    }

    fn upstreams(&self, stage: Stage) -> Vec<Stage> {
        match stage {
            Stage::Ingest => vec![],
            Stage::Prep => vec![Stage::Ingest],
            Stage::Embed => vec![Stage::Prep],
            Stage::Reduce => vec![Stage::Embed],
            Stage::Cluster => match self.config.cluster_space {
                ClusterSpace::Reduced => vec![Stage::Reduce],
                ClusterSpace::Original => vec![Stage::Embed],
            },
            Stage::Topics => vec![Stage::Cluster, Stage::Prep],
            Stage::Summarize => vec![Stage::Topics, Stage::Prep, Stage::Ingest],
            Stage::Report => vec![Stage::Summarize, Stage::Topics],
        }
    }

    fn inputs(&self, stage: Stage) -> Result<Vec<Input>> {
        let art = |producer: Stage, rel: &str| Input::Artifact {
            producer,
            rel: rel.to_string(),
        };
        Ok(match stage {
            Stage::Ingest => match &self.config.corpus {
                Some(path) => vec![Input::External {
                    role: "corpus",
                    path: path.clone(),
                }],
                None => vec![],
            },
            Stage::Prep => vec![art(Stage::Ingest, CORPUS_FILE)],
            Stage::Embed => {
                let mut v = vec![art(Stage::Prep, DOCS_FILE)];
                if self.config.embedding.kind == ProviderKind::PrecomputedFile {
                    if let Some(path) = &self.config.embedding.path {
                        v.push(Input::External {
                            role: "precomputed_embeddings",
                            path: path.clone(),
                        });
                    }
                }
                v
            }
            Stage::Reduce => vec![art(Stage::Embed, EMBEDDINGS_FILE)],
            Stage::Cluster => match self.config.cluster_space {
                ClusterSpace::Reduced => vec![art(Stage::Reduce, REDUCED_FILE)],
                ClusterSpace::Original => vec![art(Stage::Embed, EMBEDDINGS_FILE)],
            },
            Stage::Topics => vec![
                art(Stage::Cluster, ASSIGNMENT_FILE),
                art(Stage::Prep, DOCS_FILE),
            ],
            Stage::Summarize => vec![
                art(Stage::Topics, TOPICS_FILE),
                art(Stage::Prep, DOCS_FILE),
                art(Stage::Ingest, CORPUS_FILE),
            ],
            Stage::Report => {
                let record = self.manifest.stages.get(Stage::Summarize.name()).ok_or(
                    Error::MissingArtifact {
                        stage: stage.name(),
                        upstream: Stage::Summarize.name(),
                        artifact: format!("{REPORTS_DIR}/topic_<id>.json"),
                    },
                )?;
                let mut v: Vec<Input> = record
                    .outputs
                    .keys()
                    .map(|rel| art(Stage::Summarize, rel))
                    .collect();
                v.push(art(Stage::Topics, WORDSCORES_FILE));
                v
            }
        })
    }

    fn config_subset(&self, stage: Stage) -> Result<Value> {
        let c = &self.config;
        Ok(match stage {
            Stage::Ingest => json!({
                "tag": c.tag.to_lowercase(),
                "window": c.window()?,
                "api": c.api,
            }),
            Stage::Prep => json!({}),
            Stage::Embed => json!({ "embedding": c.embedding }),
            Stage::Reduce => json!({ "umap": c.umap }),
            Stage::Cluster => json!({ "hdbscan": c.hdbscan, "cluster_space": c.cluster_space }),
            Stage::Topics => json!({ "topics": c.topics }),
            Stage::Summarize => json!({ "summary": c.summary, "embedding": c.embedding }),
            Stage::Report => json!({}),
        })
    }

    /// Fingerprint of a stage under the current configuration and inputs.
    /// Missing inputs name the stage that produces them.
    fn fingerprint(&self, stage: Stage) -> Result<(String, BTreeMap<String, String>)> {
        let mut hashes = BTreeMap::new();
        for input in self.inputs(stage)? {
            match input {
                Input::Artifact { producer, rel } => {
                    let path = self.out.join(&rel);
                    if !path.is_file() {
                        return Err(Error::MissingArtifact {
                            stage: stage.name(),
                            upstream: producer.name(),
                            artifact: rel,
                        });
                    }
                    hashes.insert(rel, hash_file(&path)?);
                }
                Input::External { role, path } => {
                    let hash = hash_file(&path).map_err(|e| {
                        Error::Config(format!("cannot read {role} file {}: {e}", path.display()))
                    })?;
                    hashes.insert(role.to_string(), hash);
                }
            }
        }
        let payload = json!({
            "stage": stage.name(),
            "config": self.config_subset(stage)?,
            "inputs": hashes,
        });
        Ok((sha256_hex(payload.to_string().as_bytes()), hashes))
    }

    /// Upstream stages (transitively) whose recorded run no longer matches
    /// the configuration or the files on disk.
    fn stale_upstreams(&self, stage: Stage) -> Vec<String> {
        let mut seen = Vec::new();
        let mut stack = self.upstreams(stage);
        while let Some(up) = stack.pop() {
            if seen.contains(&up) {
                continue;
            }
            seen.push(up);
            stack.extend(self.upstreams(up));
        }
        seen.sort();
        seen.into_iter()
            .filter(|&up| {
                let Some(record) = self.manifest.stages.get(up.name()) else {
                    return true;
                };
                let current = self.fingerprint(up).map(|f| f.0);
                !self.outputs_intact(record) || current.map_or(true, |fp| fp != record.fingerprint)
            })
            .map(|s| s.name().to_string())
            .collect()
    }

    fn path(&self, rel: &str) -> PathBuf {
        self.out.join(rel)
    }

    fn execute(&self, stage: Stage) -> Result<Vec<String>> {
        match stage {
            Stage::Ingest => self.ingest(),
            Stage::Prep => self.prep(),
            Stage::Embed => self.embed(),
            Stage::Reduce => self.reduce(),
            Stage::Cluster => self.cluster(),
            Stage::Topics => self.topics(),
            Stage::Summarize => self.summarize(),
            Stage::Report => self.report(),
        }
    }

    fn ingest(&self) -> Result<Vec<String>> {
        let window = self.config.window()?;
        let tag = &self.config.tag;
        let mut report = IngestReport {
            source: String::new(),
            lines_read: 0,
            posts_parsed: 0,
            malformed_rows: vec![],
            truncated: false,
            api_status: None,
            kept_questions: 0,
            kept_answers: 0,
            dropped_questions: 0,
            dropped_answers: 0,
            orphan_answers: 0,
        };
        let mut failure = None;
        let posts: Vec<RawPost> = if let Some(path) = &self.config.corpus {
            report.source = format!("dump {}", path.display());
            let mut reader = DumpReader::new(BufReader::new(File::open(path)?));
            let mut posts = Vec::new();
            for item in reader.by_ref() {
                match item {
                    Ok(p) => posts.push(p),
                    Err(e @ Error::TruncatedDump { .. }) => {
                        report.truncated = true;
                        failure = Some(e);
                    }
                    Err(e) => return Err(e),
                }
            }
            report.lines_read = reader.lines_read();
            report.malformed_rows = reader.into_ledger();
            posts
        } else if let Some(api) = &self.config.api {
            report.source = format!("api {}", api.base_url);
            let fetched = fetch_api_pages(tag, &window, api, &ThreadSleeper)?;
            report.api_status = Some(format!("{:?}", fetched.status));
            match &fetched.status {
                FetchStatus::Complete => {}
                FetchStatus::QuotaExhausted { cursor } => {
                    warn!("API quota exhausted; resume from page {}", cursor.next_page)
                }
                FetchStatus::Partial { reason } => {
                    failure = Some(Error::Http(format!("partial corpus: {reason}")));
                }
            }
            fetched.posts
        } else {
            return Err(Error::Config(
                "no corpus source: pass --dump <Posts.xml> or --api".into(),
            ));
        };
        for entry in &report.malformed_rows {
            warn!("malformed row at line {}: {}", entry.line, entry.reason);
        }
        report.posts_parsed = posts.len();
        let (kept, stats) = filter_corpus(&posts, tag, &window);
        report.kept_questions = stats.kept_questions;
        report.kept_answers = stats.kept_answers;
        report.dropped_questions = stats.dropped_questions;
        report.dropped_answers = stats.dropped_answers;
        report.orphan_answers = stats.orphan_answers;
        CorpusStore::new(self.path(CORPUS_FILE)).write(&kept)?;
        write_atomic(&self.path(INGEST_REPORT_FILE), |w| {
            serde_json::to_writer_pretty(&mut *w, &report)?;
            w.write_all(b"\n")?;
            Ok(())
        })?;
        info!(
            "ingest: {} questions, {} answers kept of {} parsed posts",
            stats.kept_questions, stats.kept_answers, report.posts_parsed
        );
        match failure {
            Some(e) => Err(e),
            None => Ok(vec![CORPUS_FILE.into(), INGEST_REPORT_FILE.into()]),
        }
    }

    fn read_posts(&self) -> Result<Vec<RawPost>> {
        CorpusStore::new(self.path(CORPUS_FILE)).read()
    }

    fn read_docs(&self) -> Result<Vec<CleanDocument>> {
        CorpusStore::new(self.path(DOCS_FILE)).read()
    }

    fn prep(&self) -> Result<Vec<String>> {
        let posts = self.read_posts()?;
        let docs = prepare_documents(&posts, Normalizer::bundled());
        CorpusStore::new(self.path(DOCS_FILE)).write(&docs)?;
        info!("prep: {} documents", docs.len());
        Ok(vec![DOCS_FILE.into()])
    }

    fn embed(&self) -> Result<Vec<String>> {
        let docs = self.read_docs()?;
        let m = embed_corpus(&docs, &self.config.embedding)?;
        if !m.zero_rows.is_empty() {
            warn!(
                "embed: {} documents have no tokens and a zero vector",
                m.zero_rows.len()
            );
        }
        m.save(&self.path(EMBEDDINGS_FILE))?;
        Ok(vec![EMBEDDINGS_FILE.into()])
    }

    fn reduce(&self) -> Result<Vec<String>> {
        let m = EmbeddingMatrix::load(&self.path(EMBEDDINGS_FILE))?;
        let y = umap_reduce(m.view(), &self.config.umap)?;
        y.save(&self.path(REDUCED_FILE))?;
        Ok(vec![REDUCED_FILE.into()])
    }

    fn cluster(&self) -> Result<Vec<String>> {
        let (n, dim, values) = match self.config.cluster_space {
            ClusterSpace::Reduced => {
                let y = ReducedEmbedding::load(&self.path(REDUCED_FILE))?;
                (y.n_rows, y.dim_out, y.values)
            }
            ClusterSpace::Original => {
                let m = EmbeddingMatrix::load(&self.path(EMBEDDINGS_FILE))?;
                (m.n_rows, m.dim, m.values)
            }
        };
        let assignment = hdbscan_fit(MatrixView::new(n, dim, &values)?, &self.config.hdbscan)?;
        info!(
            "cluster: {} clusters, {} noise of {n}",
            assignment.k,
            assignment.n_noise()
        );
        assignment.save(&self.path(ASSIGNMENT_FILE))?;
        Ok(vec![ASSIGNMENT_FILE.into()])
    }

    fn topics(&self) -> Result<Vec<String>> {
        let assignment = ClusterAssignment::load(&self.path(ASSIGNMENT_FILE))?;
        let docs = self.read_docs()?;
        let topics = build_topics(&assignment, &docs, &self.config.topics)?;
        save_topics(&self.path(TOPICS_FILE), &topics)?;
        let rows = export_word_scores(&topics, WORDSCORE_TOPICS, WORDSCORE_TERMS);
        save_word_scores(&self.path(WORDSCORES_FILE), &rows)?;
        Ok(vec![TOPICS_FILE.into(), WORDSCORES_FILE.into()])
    }

    fn sentence_embedder(&self) -> Result<Box<dyn SentenceEmbedder>> {
        let e = &self.config.embedding;
        Ok(match e.kind {
            ProviderKind::RemoteHttp => Box::new(RemoteSentenceEmbedder {
                embedder: e.remote_embedder()?,
            }),
            ProviderKind::HashedTfidf | ProviderKind::PrecomputedFile => {
                Box::new(HashedSentenceEmbedder {
                    normalizer: Normalizer::bundled(),
                    dim: e.dim.max(MIN_HASHED_DIM),
                })
            }
        })
    }

    fn summarize(&self) -> Result<Vec<String>> {
        let topics = load_topics(&self.path(TOPICS_FILE))?;
        let docs = self.read_docs()?;
        let posts = self.read_posts()?;
        let embedder = self.sentence_embedder()?;
        let reports = assemble_reports(
            &topics,
            &docs,
            &posts,
            &self.config.summary,
            embedder.as_ref(),
        )?;
        let dir = self.path(REPORTS_DIR);
        remove_matching(&dir, ".json")?;
        let mut outputs = Vec::new();
        for report in &reports {
            let rel = format!("{REPORTS_DIR}/topic_{}.json", report.topic.topic_id);
            write_atomic(&self.path(&rel), |w| write_json(w, report))?;
            outputs.push(rel);
        }
        Ok(outputs)
    }

    fn report(&self) -> Result<Vec<String>> {
        let record = &self.manifest.stages[Stage::Summarize.name()];
        let dir = self.path(REPORTS_DIR);
        remove_matching(&dir, ".md")?;
        let mut outputs = Vec::new();
        for rel in record.outputs.keys() {
            let report: TopicReport =
                serde_json::from_reader(BufReader::new(File::open(self.path(rel))?))?;
            let md_rel = rel.replace(".json", ".md");
            let md = render_markdown(&report);
            write_atomic(&self.path(&md_rel), |w| Ok(w.write_all(md.as_bytes())?))?;
            outputs.push(md_rel);
        }
        let rows = read_word_scores_csv(&self.path(WORDSCORES_FILE))?;
        save_wordscore_svg(&self.path(WORDSCORES_SVG), &rows)?;
        outputs.push(WORDSCORES_SVG.into());
        Ok(outputs)
    }
}

/// Delete `topic_*<ext>` files left by an earlier run.
fn remove_matching(dir: &Path, ext: &str) -> Result<()> {
    let Ok(entries) = fs::read_dir(dir) else {
        return Ok(());
    };
    for entry in entries {
        let path = entry?.path();
        let name = path
            .file_name()
            .and_then(|n| n.to_str())
            .unwrap_or_default();
        if name.starts_with("topic_") && name.ends_with(ext) {
            fs::remove_file(&path)?;
        }
    }
    Ok(())
}
