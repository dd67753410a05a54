//! Mine a developer Q&A corpus for prevalent API-problem topics and produce
//! short problem/solution reports.
//!
//! The pipeline runs in eight resumable stages:
//!
//! ```text
//! ingest -> prep -> embed -> reduce -> cluster -> topics -> summarize -> report
//! ```
//!
//! * [`corpus`] reads Stack Exchange `Posts.xml` dumps (or the public API),
//!   filters by tag and date window and splits HTML bodies into prose and code.
//! * [`text`] segments sentences and normalizes tokens (stopwords, lemma
//!   lookup, Porter stemming).
//! * [`embedding`] turns documents into dense vectors through a pluggable
//!   provider (hashed TF-IDF, precomputed file, remote HTTP server).
//! * [`reduction`] implements PCA and UMAP.
//! * [`clustering`] implements HDBSCAN.
//! * [`topics`] weights terms per cluster with class-based TF-IDF and labels
//!   topics.
//! * [`summarize`] selects high-vote questions and accepted or high-vote
//!   answers and extracts summary sentences with k-means over sentence
//!   embeddings.
//! * [`pipeline`] wires the stages together with a manifest so unchanged
//!   stages are skipped on re-runs.
//!
//! Runnable walkthroughs of each capability live in the crate's `examples/`
//! directory (`cargo run -p apitopics --example <name>`).

pub mod clustering;
pub mod corpus;
pub mod datasets;
pub mod embedding;
mod error;
pub mod matrix;
pub mod pipeline;
pub mod plot;
pub mod reduction;
pub mod summarize;
pub mod text;
pub mod topics;
mod util;

pub use error::{Error, Result};
