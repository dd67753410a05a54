//! Problem/solution summaries per topic: pick well-voted questions and their
//! best answers, extract representative sentences and attach code.

mod extract;
mod render;

use std::collections::HashMap;

use log::debug;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use extract::{default_summary_len, extractive_summarize};
pub use render::{render_markdown, save_report, write_json};

use crate::corpus::{split_html, RawPost, Sleeper, ThreadSleeper};
use crate::embedding::{hashed_tfidf_embed, RemoteEmbedder};
use crate::text::{segment_sentences, CleanDocument, Normalizer};
use crate::topics::Topic;
use crate::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SummaryParams {
    pub q_min: i64,
    pub a_min: i64,
    pub max_pairs: usize,
    /// Upper bound on summary length; the default length also scales with
    /// the number of sentences.
    pub max_sentences: usize,
    /// Each code snippet is cut to at most this many bytes.
    pub snippet_max_bytes: usize,
    pub seed: u64,
}

impl Default for SummaryParams {
    fn default() -> Self {
        Self {
            q_min: 3,
            a_min: 2,
            max_pairs: 5,
            max_sentences: 3,
            snippet_max_bytes: 4096,
            seed: 0,
        }
    }
}

/// Ordered as the sentences appear: title before body.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SentenceSource {
    Title,
    Body,
}

/// A sentence copied verbatim from a post, with character offsets into the
/// title or the body prose.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtractedSentence {
    pub text: String,
    pub source: SentenceSource,
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemSolutionPair {
    pub topic_id: usize,
    pub question_id: u64,
    pub question_score: i64,
    pub problem_summary: Vec<ExtractedSentence>,
    pub answer_id: u64,
    pub answer_score: i64,
    pub answer_accepted: bool,
    pub solution_summary: Vec<ExtractedSentence>,
    /// Question snippets first, then answer snippets.
    pub code_snippets: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicReport {
    pub topic: Topic,
    pub pairs: Vec<ProblemSolutionPair>,
    /// Qualifying questions dropped because no answer qualified.
    pub skipped_without_answer: usize,
}

/// Turns the sentences of one post into vectors.
pub trait SentenceEmbedder: Sync {
    fn embed_sentences(&self, sentences: &[String]) -> Result<Vec<Vec<f64>>>;
}

/// Hashed TF-IDF fitted on the sentences of the post being summarized.
pub struct HashedSentenceEmbedder<'a> {
    pub normalizer: &'a Normalizer,
    pub dim: usize,
}

impl SentenceEmbedder for HashedSentenceEmbedder<'_> {
    fn embed_sentences(&self, sentences: &[String]) -> Result<Vec<Vec<f64>>> {
        let tokens: Vec<Vec<String>> = sentences
            .iter()
            .map(|s| self.normalizer.normalize_tokens(s))
            .collect();
        let m = hashed_tfidf_embed(&tokens, self.dim)?;
        Ok((0..m.n_rows).map(|i| m.row(i).to_vec()).collect())
    }
}

pub struct RemoteSentenceEmbedder {
    pub embedder: RemoteEmbedder,
}

impl SentenceEmbedder for RemoteSentenceEmbedder {
    fn embed_sentences(&self, sentences: &[String]) -> Result<Vec<Vec<f64>>> {
        self.embedder
            .embed_texts(sentences, &ThreadSleeper as &dyn Sleeper)
    }
}

/// Questions scoring at least `q_min`, best first (ties by lower id), at
/// most `max_pairs` of them.
pub fn select_questions<'a>(
    questions: &[&'a RawPost],
    q_min: i64,
    max_pairs: usize,
) -> Vec<&'a RawPost> {
    let mut chosen: Vec<&RawPost> = questions
        .iter()
        .copied()
        .filter(|q| q.score >= q_min)
        .collect();
    chosen.sort_by(|a, b| b.score.cmp(&a.score).then(a.post_id.cmp(&b.post_id)));
    chosen.truncate(max_pairs);
    chosen
}

/// The accepted answer if present, else the best answer scoring at least
/// `a_min` (ties by lower id).
pub fn select_answer<'a>(
    question: &RawPost,
    answers: &[&'a RawPost],
    a_min: i64,
) -> Option<&'a RawPost> {
    if let Some(accepted) = question.accepted_answer_id {
        if let Some(a) = answers.iter().find(|a| a.post_id == accepted) {
            return Some(a);
        }
    }
    answers
        .iter()
        .copied()
        .filter(|a| a.score >= a_min)
        .min_by(|a, b| b.score.cmp(&a.score).then(a.post_id.cmp(&b.post_id)))
}

/// Lookup of questions and answers by id.
pub struct CorpusIndex<'a> {
    posts: HashMap<u64, &'a RawPost>,
    answers: HashMap<u64, Vec<&'a RawPost>>,
}

impl<'a> CorpusIndex<'a> {
    pub fn new(posts: &'a [RawPost]) -> Self {
        let mut by_id = HashMap::new();
        let mut answers: HashMap<u64, Vec<&RawPost>> = HashMap::new();
        for p in posts {
            by_id.insert(p.post_id, p);
            if let (false, Some(parent)) = (p.is_question(), p.parent_id) {
                answers.entry(parent).or_default().push(p);
            }
        }
        for list in answers.values_mut() {
            list.sort_by_key(|a| a.post_id);
        }
        Self {
            posts: by_id,
            answers,
        }
    }

    pub fn post(&self, id: u64) -> Option<&'a RawPost> {
        self.posts.get(&id).copied()
    }

    pub fn answers(&self, question_id: u64) -> &[&'a RawPost] {
        self.answers.get(&question_id).map_or(&[], Vec::as_slice)
    }
}

fn truncate_bytes(s: &str, max: usize) -> String {
    if s.len() <= max {
        return s.to_string();
    }
    let mut end = max;
    while !s.is_char_boundary(end) {
        end -= 1;
    }
    s[..end].to_string()
}

/// Sentences of a post in order: the title (if any) first, then the prose.
fn post_sentences(post: &RawPost) -> (Vec<ExtractedSentence>, Vec<String>) {
    let (prose, code) = split_html(&post.body_html);
    let mut out = Vec::new();
    if let Some(title) = post
        .title
        .as_deref()
        .map(str::trim)
        .filter(|t| !t.is_empty())
    {
        out.push(ExtractedSentence {
            text: title.to_string(),
            source: SentenceSource::Title,
            start: 0,
            end: title.chars().count(),
        });
    }
    out.extend(
        segment_sentences(&prose)
            .into_iter()
            .map(|s| ExtractedSentence {
                text: s.text,
                source: SentenceSource::Body,
                start: s.start,
                end: s.end,
            }),
    );
    (out, code)
}

fn summarize_post(
    post: &RawPost,
    params: &SummaryParams,
    embedder: &dyn SentenceEmbedder,
) -> Result<(Vec<ExtractedSentence>, Vec<String>)> {
    let (sentences, code) = post_sentences(post);
    if sentences.is_empty() {
        return Ok((sentences, code));
    }
    let texts: Vec<String> = sentences.iter().map(|s| s.text.clone()).collect();
    let embeddings = embedder.embed_sentences(&texts)?;
    let k = default_summary_len(sentences.len())
        .min(params.max_sentences)
        .max(1);
    let seed = params.seed ^ post.post_id.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    let picked = extractive_summarize(&embeddings, k, seed);
    Ok((
        picked.into_iter().map(|i| sentences[i].clone()).collect(),
        code,
    ))
}

/// Build the report of one topic.
pub fn assemble_report(
    topic: &Topic,
    docs: &[CleanDocument],
    index: &CorpusIndex<'_>,
    params: &SummaryParams,
    embedder: &dyn SentenceEmbedder,
) -> Result<TopicReport> {
    let questions: Vec<&RawPost> = topic
        .member_doc_ids
        .iter()
        .filter_map(|&d| docs.get(d))
        .filter_map(|d| index.post(d.source_post_id))
        .collect();
    let mut pairs = Vec::new();
    let mut skipped = 0;
    for q in select_questions(&questions, params.q_min, params.max_pairs) {
        let Some(answer) = select_answer(q, index.answers(q.post_id), params.a_min) else {
            skipped += 1;
            continue;
        };
        let (problem_summary, q_code) = summarize_post(q, params, embedder)?;
        let (solution_summary, a_code) = summarize_post(answer, params, embedder)?;
        pairs.push(ProblemSolutionPair {
            topic_id: topic.topic_id,
            question_id: q.post_id,
            question_score: q.score,
            problem_summary,
            answer_id: answer.post_id,
            answer_score: answer.score,
            answer_accepted: q.accepted_answer_id == Some(answer.post_id),
            solution_summary,
            code_snippets: q_code
                .iter()
                .chain(&a_code)
                .map(|c| truncate_bytes(c, params.snippet_max_bytes))
                .collect(),
        });
    }
    debug!(
        "topic {}: {} pairs, {} skipped",
        topic.topic_id,
        pairs.len(),
        skipped
    );
    Ok(TopicReport {
        topic: topic.clone(),
        pairs,
        skipped_without_answer: skipped,
    })
}

/// Reports for all topics, computed in parallel and returned in topic order.
pub fn assemble_reports(
    topics: &[Topic],
    docs: &[CleanDocument],
    posts: &[RawPost],
    params: &SummaryParams,
    embedder: &dyn SentenceEmbedder,
) -> Result<Vec<TopicReport>> {
    let index = CorpusIndex::new(posts);
    topics
        .par_iter()
        .map(|t| assemble_report(t, docs, &index, params, embedder))
        .collect()
}
