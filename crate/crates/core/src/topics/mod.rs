//! Topic representation: class-based TF-IDF over clusters, readable labels
//! and the word-score table.

mod ctfidf;

use std::collections::{BTreeMap, HashMap};
use std::fs::File;
use std::io::{BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

pub use ctfidf::{c_tf_idf, rank_terms, ClassTermCounts};

use crate::clustering::ClusterAssignment;
use crate::text::CleanDocument;
use crate::util::write_atomic;
use crate::{Error, Result};

pub const LABEL_TERMS: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TopicParams {
    /// Terms kept per topic.
    pub top_terms: usize,
    /// L1-normalize term frequencies within each class.
    pub normalize_tf: bool,
}

impl Default for TopicParams {
    fn default() -> Self {
        Self {
            top_terms: 10,
            normalize_tf: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermWeight {
    /// Normalized (stemmed) term.
    pub term: String,
    /// Most frequent pre-stem spelling of `term` in the corpus.
    pub surface: String,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Topic {
    pub topic_id: usize,
    pub member_doc_ids: Vec<usize>,
    pub size: usize,
    pub top_terms: Vec<TermWeight>,
    pub label: String,
}

/// Stem to most frequent surface form; ties go to the lexicographically
/// smallest surface.
#[derive(Debug, Clone, Default)]
pub struct SurfaceMap {
    counts: HashMap<String, BTreeMap<String, usize>>,
}

impl SurfaceMap {
    pub fn from_documents(docs: &[CleanDocument]) -> Self {
        let mut map = Self::default();
        for doc in docs {
            for (t, s) in doc.tokens.iter().zip(&doc.surfaces) {
                map.add(t, s);
            }
        }
        map
    }

    pub fn add(&mut self, term: &str, surface: &str) {
        *self
            .counts
            .entry(term.to_string())
            .or_default()
            .entry(surface.to_string())
            .or_default() += 1;
    }

    /// Falls back to the term itself when it was never seen.
    pub fn surface<'a>(&'a self, term: &'a str) -> &'a str {
        self.counts
            .get(term)
            .and_then(|forms| {
                // BTreeMap iterates in ascending order, so the first maximum wins
                forms
                    .iter()
                    .fold(None::<(&String, usize)>, |best, (s, &c)| match best {
                        Some((_, bc)) if bc >= c => best,
                        _ => Some((s, c)),
                    })
                    .map(|(s, _)| s.as_str())
            })
            .unwrap_or(term)
    }
}

/// Sum member token counts per cluster. Noise documents are skipped.
pub fn build_class_documents(
    assignment: &ClusterAssignment,
    docs: &[CleanDocument],
) -> Result<ClassTermCounts> {
    if assignment.labels.len() != docs.len() {
        return Err(Error::DimensionMismatch {
            expected: docs.len(),
            found: assignment.labels.len(),
        });
    }
    let mut classes: Vec<Vec<&str>> = vec![Vec::new(); assignment.k];
    for (doc, &label) in docs.iter().zip(&assignment.labels) {
        if label >= 0 {
            classes[label as usize].extend(doc.tokens.iter().map(String::as_str));
        }
    }
    Ok(ClassTermCounts::from_tokens(classes))
}

/// Label = first four surfaces joined by `_`.
pub fn topic_label(terms: &[TermWeight]) -> String {
    terms
        .iter()
        .take(LABEL_TERMS)
        .map(|t| t.surface.as_str())
        .collect::<Vec<_>>()
        .join("_")
}

/// One topic per cluster, `topic_id` equal to the cluster id (so topic 0 is
/// the largest cluster).
pub fn build_topics(
    assignment: &ClusterAssignment,
    docs: &[CleanDocument],
    params: &TopicParams,
) -> Result<Vec<Topic>> {
    let counts = build_class_documents(assignment, docs)?;
    let weights = c_tf_idf(&counts, params.normalize_tf);
    let surfaces = SurfaceMap::from_documents(docs);
    Ok(weights
        .iter()
        .enumerate()
        .map(|(topic_id, w)| {
            let top_terms: Vec<TermWeight> = rank_terms(w)
                .into_iter()
                .take(params.top_terms)
                .map(|(term, weight)| TermWeight {
                    surface: surfaces.surface(&term).to_string(),
                    term,
                    weight,
                })
                .collect();
            let member_doc_ids = assignment.members(topic_id);
            Topic {
                topic_id,
                size: member_doc_ids.len(),
                member_doc_ids,
                label: topic_label(&top_terms),
                top_terms,
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WordScoreRow {
    pub topic_id: usize,
    pub label: String,
    /// 1-based.
    pub rank: usize,
    pub term: String,
    pub weight: f64,
}

/// Top `top_k_terms` terms of the `top_n_topics` largest topics, shown by
/// surface form.
pub fn export_word_scores(
    topics: &[Topic],
    top_n_topics: usize,
    top_k_terms: usize,
) -> Vec<WordScoreRow> {
    let mut by_size: Vec<&Topic> = topics.iter().collect();
    by_size.sort_by(|a, b| b.size.cmp(&a.size).then(a.topic_id.cmp(&b.topic_id)));
    by_size
        .into_iter()
        .take(top_n_topics)
        .flat_map(|t| {
            t.top_terms
                .iter()
                .take(top_k_terms)
                .enumerate()
                .map(|(i, tw)| WordScoreRow {
                    topic_id: t.topic_id,
                    label: t.label.clone(),
                    rank: i + 1,
                    term: tw.surface.clone(),
                    weight: tw.weight,
                })
        })
        .collect()
}

pub fn write_word_scores_csv<W: Write>(out: W, rows: &[WordScoreRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row).map_err(std::io::Error::from)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_word_scores_csv(path: &Path) -> Result<Vec<WordScoreRow>> {
    let mut r = csv::Reader::from_path(path).map_err(std::io::Error::from)?;
    let rows = r
        .deserialize()
        .collect::<std::result::Result<Vec<WordScoreRow>, _>>();
    Ok(rows.map_err(std::io::Error::from)?)
}

pub fn save_word_scores(path: &Path, rows: &[WordScoreRow]) -> Result<()> {
    write_atomic(path, |w| write_word_scores_csv(w, rows))
}

pub fn save_topics(path: &Path, topics: &[Topic]) -> Result<()> {
    write_atomic(path, |w| {
        serde_json::to_writer_pretty(&mut *w, topics)?;
        w.write_all(b"\n")?;
        Ok(())
    })
}

pub fn load_topics(path: &Path) -> Result<Vec<Topic>> {
    Ok(serde_json::from_reader(BufReader::new(File::open(path)?))?)
}
