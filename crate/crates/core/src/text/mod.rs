//! Sentence segmentation and token normalization.

mod normalize;
mod porter;
mod sentences;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use normalize::{NormalizedToken, Normalizer};
pub use porter::porter_stem;
pub use sentences::{char_slice, segment_sentences, Sentence};

use crate::corpus::{split_html, RawPost};

/// A question ready for topic modeling and summarization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CleanDocument {
    /// Dense, corpus-ordered index; row `doc_id` of every matrix.
    pub doc_id: usize,
    pub source_post_id: u64,
    pub title: Option<String>,
    pub prose_text: String,
    pub code_snippets: Vec<String>,
    pub sentences: Vec<Sentence>,
    /// Normalized tokens of title and prose.
    pub tokens: Vec<String>,
    /// Pre-stem form of each token, parallel to `tokens`.
    pub surfaces: Vec<String>,
}

impl CleanDocument {
    pub fn from_post(doc_id: usize, post: &RawPost, normalizer: &Normalizer) -> Self {
        let (prose_text, code_snippets) = split_html(&post.body_html);
        let sentences = segment_sentences(&prose_text);
        let token_source = match &post.title {
            Some(title) => format!("{title}. {prose_text}"),
            None => prose_text.clone(),
        };
        let (tokens, surfaces) = normalizer
            .normalize_with_surface(&token_source)
            .into_iter()
            .map(|t| (t.token, t.surface))
            .unzip();
        Self {
            doc_id,
            source_post_id: post.post_id,
            title: post.title.clone(),
            prose_text,
            code_snippets,
            sentences,
            tokens,
            surfaces,
        }
    }

    /// Title and prose joined, the text handed to text-based embedders.
    pub fn embedding_text(&self) -> String {
        match &self.title {
            Some(title) if self.prose_text.is_empty() => title.clone(),
            Some(title) => format!("{title}. {}", self.prose_text),
            None => self.prose_text.clone(),
        }
    }
}

/// Turn the questions of a corpus into documents, numbered in corpus order.
/// Answers are not topic-modeled; summarization reads them from the corpus.
pub fn prepare_documents(posts: &[RawPost], normalizer: &Normalizer) -> Vec<CleanDocument> {
    let questions: Vec<&RawPost> = posts.iter().filter(|p| p.is_question()).collect();
    questions
        .par_iter()
        .enumerate()
        .map(|(doc_id, post)| CleanDocument::from_post(doc_id, post, normalizer))
        .collect()
}
