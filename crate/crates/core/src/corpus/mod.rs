//! Post acquisition: dump parsing, API fetching, filtering and storage.

mod api;
mod dump;
mod html;
mod store;

use std::collections::HashSet;

use chrono::{DateTime, Datelike, NaiveDate, Utc};
use serde::{Deserialize, Serialize};

pub use api::{
    fetch_api_pages, ApiClientConfig, ApiFetch, FetchStatus, ResumeCursor, Sleeper, ThreadSleeper,
};
pub use dump::{parse_dump_rows, write_posts_xml, DumpReader, LedgerEntry};
pub use html::split_html;
pub use store::CorpusStore;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PostKind {
    Question,
    Answer,
}

/// One question or answer as published by Stack Exchange.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawPost {
    pub post_id: u64,
    pub kind: PostKind,
    pub parent_id: Option<u64>,
    pub title: Option<String>,
    pub body_html: String,
    pub tags: Vec<String>,
    /// Upvotes minus downvotes.
    pub score: i64,
    pub accepted_answer_id: Option<u64>,
    pub created_at: DateTime<Utc>,
}

impl RawPost {
    pub fn is_question(&self) -> bool {
        self.kind == PostKind::Question
    }

    /// Check the per-kind field invariants.
    pub fn validate(&self) -> std::result::Result<(), String> {
        if self.post_id == 0 {
            return Err("post_id must be positive".into());
        }
        match self.kind {
            PostKind::Answer => {
                if self.parent_id.is_none() {
                    return Err(format!("answer {} has no parent_id", self.post_id));
                }
                if !self.tags.is_empty() {
                    return Err(format!("answer {} carries tags", self.post_id));
                }
                if self.accepted_answer_id.is_some() {
                    return Err(format!(
                        "answer {} carries accepted_answer_id",
                        self.post_id
                    ));
                }
            }
            PostKind::Question => {
                if self.parent_id.is_some() {
                    return Err(format!("question {} has a parent_id", self.post_id));
                }
            }
        }
        Ok(())
    }
}

/// Inclusive calendar-day window on `created_at` (UTC).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DateWindow {
    pub from: NaiveDate,
    pub to: NaiveDate,
}

impl Default for DateWindow {
    /// January 2009 through April 2023.
    fn default() -> Self {
        Self {
            from: NaiveDate::from_ymd_opt(2009, 1, 1).unwrap(),
            to: NaiveDate::from_ymd_opt(2023, 4, 30).unwrap(),
        }
    }
}

impl DateWindow {
    pub fn new(from: NaiveDate, to: NaiveDate) -> Result<Self> {
        if from > to {
            return Err(Error::InvalidInput(format!(
                "empty date window {from}..{to}"
            )));
        }
        Ok(Self { from, to })
    }

    /// Parse `--from`/`--to` style bounds. Accepts `YYYY-MM-DD` or `YYYY-MM`;
    /// a month-only upper bound means the last day of that month.
    pub fn parse_bound(text: &str, upper: bool) -> Result<NaiveDate> {
        let text = text.trim();
        if let Ok(date) = NaiveDate::parse_from_str(text, "%Y-%m-%d") {
            return Ok(date);
        }
        let first = NaiveDate::parse_from_str(&format!("{text}-01"), "%Y-%m-%d").map_err(|_| {
            Error::InvalidInput(format!("bad date {text:?}; use YYYY-MM or YYYY-MM-DD"))
        })?;
        if !upper {
            return Ok(first);
        }
        let (y, m) = if first.month() == 12 {
            (first.year() + 1, 1)
        } else {
            (first.year(), first.month() + 1)
        };
        Ok(NaiveDate::from_ymd_opt(y, m, 1)
            .unwrap()
            .pred_opt()
            .unwrap())
    }

    pub fn contains(&self, when: &DateTime<Utc>) -> bool {
        let day = when.date_naive();
        self.from <= day && day <= self.to
    }
}

/// Counters reported by [`filter_corpus`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterStats {
    pub kept_questions: usize,
    pub kept_answers: usize,
    pub dropped_questions: usize,
    /// Answers whose parent question was dropped by the filter.
    pub dropped_answers: usize,
    /// Answers whose parent question is absent from the input.
    pub orphan_answers: usize,
}

/// Keep questions tagged `tag` inside `window`, and answers of kept questions.
/// Input order is preserved.
pub fn filter_corpus(
    posts: &[RawPost],
    tag: &str,
    window: &DateWindow,
) -> (Vec<RawPost>, FilterStats) {
    let tag = tag.to_lowercase();
    let mut stats = FilterStats::default();
    let all_questions: HashSet<u64> = posts
        .iter()
        .filter(|p| p.is_question())
        .map(|p| p.post_id)
        .collect();
    let kept_questions: HashSet<u64> = posts
        .iter()
        .filter(|p| p.is_question() && p.tags.contains(&tag) && window.contains(&p.created_at))
        .map(|p| p.post_id)
        .collect();

    let mut out = Vec::new();
    for post in posts {
        match post.kind {
            PostKind::Question => {
                if kept_questions.contains(&post.post_id) {
                    stats.kept_questions += 1;
                    out.push(post.clone());
                } else {
                    stats.dropped_questions += 1;
                }
            }
            PostKind::Answer => {
                let parent = post.parent_id.unwrap_or(0);
                if kept_questions.contains(&parent) {
                    stats.kept_answers += 1;
                    out.push(post.clone());
                } else if all_questions.contains(&parent) {
                    stats.dropped_answers += 1;
                } else {
                    stats.orphan_answers += 1;
                }
            }
        }
    }
    (out, stats)
}
