//! Stack Exchange API v2.3 client.
//!
//! Questions are paged through `/2.3/questions?tagged=..&fromdate=..&todate=..&page=..`
//! until `has_more` is false; answers of the retained questions are then
//! fetched through `/2.3/questions/{ids}/answers`. The `backoff` field is
//! honoured before the next request, transient failures are retried with
//! exponential delays, and quota exhaustion stops cleanly with a resume cursor.

use std::path::PathBuf;
use std::time::Duration;

use chrono::{DateTime, NaiveTime, Utc};
use serde::{Deserialize, Serialize};

use super::{DateWindow, PostKind, RawPost};
use crate::util::write_atomic;
use crate::{Error, Result};

/// Throttle violation error id returned by the API.
const THROTTLE_VIOLATION: i64 = 502;

pub trait Sleeper {
    fn sleep(&self, duration: Duration);
}

#[derive(Debug, Default, Clone, Copy)]
pub struct ThreadSleeper;

impl Sleeper for ThreadSleeper {
    fn sleep(&self, duration: Duration) {
        std::thread::sleep(duration);
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct ApiClientConfig {
    pub base_url: String,
    pub site: String,
    pub key: Option<String>,
    pub page_size: u32,
    /// Retries per request after the first attempt.
    pub max_retries: u32,
    pub initial_retry_delay_ms: u64,
    pub timeout_secs: u64,
    pub fetch_answers: bool,
    /// Stop after this many question pages (useful for sampling).
    pub max_pages: Option<u32>,
    /// Where to persist the resume cursor when the quota runs out.
    pub cursor_path: Option<PathBuf>,
    pub start_page: u32,
}

impl Default for ApiClientConfig {
    fn default() -> Self {
        Self {
            base_url: "https://api.stackexchange.com".into(),
            site: "stackoverflow".into(),
            key: None,
            page_size: 100,
            max_retries: 4,
            initial_retry_delay_ms: 1_000,
            timeout_secs: 30,
            fetch_answers: true,
            max_pages: None,
            cursor_path: None,
            start_page: 1,
        }
    }
}

/// Where a stopped fetch should pick up again.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResumeCursor {
    pub tag: String,
    pub window: DateWindow,
    pub next_page: u32,
}

impl ResumeCursor {
    pub fn load(path: &std::path::Path) -> Result<Self> {
        Ok(serde_json::from_slice(&std::fs::read(path)?)?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FetchStatus {
    Complete,
    /// Retries were exhausted; the posts gathered so far are returned.
    Partial {
        reason: String,
    },
    QuotaExhausted {
        cursor: ResumeCursor,
    },
}

#[derive(Debug, Clone)]
pub struct ApiFetch {
    pub posts: Vec<RawPost>,
    pub question_requests: usize,
    pub answer_requests: usize,
    pub status: FetchStatus,
}

#[derive(Debug, Deserialize)]
struct Wrapper<T> {
    #[serde(default = "Vec::new")]
    items: Vec<T>,
    #[serde(default)]
    has_more: bool,
    backoff: Option<u64>,
    quota_remaining: Option<i64>,
    error_id: Option<i64>,
    error_message: Option<String>,
}

#[derive(Debug, Deserialize)]
struct QuestionItem {
    question_id: u64,
    title: Option<String>,
    #[serde(default)]
    body: String,
    #[serde(default)]
    tags: Vec<String>,
    score: i64,
    accepted_answer_id: Option<u64>,
    creation_date: i64,
}

#[derive(Debug, Deserialize)]
struct AnswerItem {
    answer_id: u64,
    question_id: u64,
    #[serde(default)]
    body: String,
    score: i64,
    creation_date: i64,
}

enum PageOutcome<T> {
    Page(Wrapper<T>),
    Quota,
    Failed(String),
}

struct Client<'a> {
    http: reqwest::blocking::Client,
    config: &'a ApiClientConfig,
    sleeper: &'a dyn Sleeper,
    pending_backoff: Option<Duration>,
}

impl Client<'_> {
    fn get<T: for<'de> Deserialize<'de>>(&mut self, url: &str) -> PageOutcome<T> {
        if let Some(wait) = self.pending_backoff.take() {
            self.sleeper.sleep(wait);
        }
        let mut attempt = 0u32;
        loop {
            let result = self.http.get(url).send();
            let failure = match result {
                Ok(resp) => {
                    let status = resp.status();
                    let body = match resp.text() {
                        Ok(b) => b,
                        Err(e) => {
                            return self
                                .retry_or_fail(&mut attempt, e.to_string())
                                .unwrap_or_else(|| {
                                    PageOutcome::Failed(format!("reading body: {e}"))
                                })
                        }
                    };
                    let parsed: std::result::Result<Wrapper<T>, _> = serde_json::from_str(&body);
                    match parsed {
                        Ok(page) if page.error_id == Some(THROTTLE_VIOLATION) => {
                            return PageOutcome::Quota
                        }
                        Ok(page) if status.is_success() && page.error_id.is_none() => {
                            if let Some(secs) = page.backoff {
                                self.pending_backoff = Some(Duration::from_secs(secs));
                            }
                            return PageOutcome::Page(page);
                        }
                        Ok(page) if status.is_client_error() && status.as_u16() != 429 => {
                            return PageOutcome::Failed(format!(
                                "HTTP {status}: {}",
                                page.error_message.unwrap_or_default()
                            ));
                        }
                        Ok(_) => format!("HTTP {status}"),
                        Err(e) if status.is_success() => {
                            return PageOutcome::Failed(format!("undecodable response: {e}"))
                        }
                        Err(_) => format!("HTTP {status}"),
                    }
                }
                Err(e) => e.to_string(),
            };
            if let Some(outcome) = self.retry_or_fail(&mut attempt, failure) {
                return outcome;
            }
        }
    }

    /// Sleep before the next attempt, or give up once retries are spent.
    fn retry_or_fail<T>(&self, attempt: &mut u32, reason: String) -> Option<PageOutcome<T>> {
        if *attempt >= self.config.max_retries {
            return Some(PageOutcome::Failed(format!(
                "giving up after {} attempts: {reason}",
                *attempt + 1
            )));
        }
        let delay = self
            .config
            .initial_retry_delay_ms
            .saturating_mul(1 << (*attempt).min(16));
        log::warn!("request failed ({reason}); retrying in {delay} ms");
        self.sleeper.sleep(Duration::from_millis(delay));
        *attempt += 1;
        None
    }

    fn with_common(&self, mut url: String) -> String {
        url.push_str(&format!(
            "&site={}&pagesize={}&filter=withbody",
            self.config.site, self.config.page_size
        ));
        if let Some(key) = &self.config.key {
            url.push_str(&format!("&key={key}"));
        }
        url
    }
}

fn unix_to_utc(secs: i64) -> Result<DateTime<Utc>> {
    DateTime::from_timestamp(secs, 0)
        .ok_or_else(|| Error::InvalidInput(format!("bad creation_date {secs}")))
}

/// Fetch questions tagged `tag` inside `window` (and, optionally, their answers).
pub fn fetch_api_pages(
    tag: &str,
    window: &DateWindow,
    config: &ApiClientConfig,
    sleeper: &dyn Sleeper,
) -> Result<ApiFetch> {
    let http = reqwest::blocking::Client::builder()
        .timeout(Duration::from_secs(config.timeout_secs))
        .build()?;
    let mut client = Client {
        http,
        config,
        sleeper,
        pending_backoff: None,
    };
    let tag = tag.to_lowercase();
    let from = window.from.and_time(NaiveTime::MIN).and_utc().timestamp();
    let to = window
        .to
        .and_hms_opt(23, 59, 59)
        .unwrap()
        .and_utc()
        .timestamp();
    let base = config.base_url.trim_end_matches('/');

    let mut fetch = ApiFetch {
        posts: Vec::new(),
        question_requests: 0,
        answer_requests: 0,
        status: FetchStatus::Complete,
    };
    let mut question_ids = Vec::new();
    let mut page = config.start_page.max(1);
    let mut pages_done = 0u32;

    loop {
        if config.max_pages.is_some_and(|max| pages_done >= max) {
            break;
        }
        let url = client.with_common(format!(
            "{base}/2.3/questions?tagged={tag}&fromdate={from}&todate={to}&page={page}&order=asc&sort=creation"
        ));
        fetch.question_requests += 1;
        match client.get::<QuestionItem>(&url) {
            PageOutcome::Page(wrapper) => {
                for item in wrapper.items {
                    question_ids.push(item.question_id);
                    fetch.posts.push(RawPost {
                        post_id: item.question_id,
                        kind: PostKind::Question,
                        parent_id: None,
                        title: item
                            .title
                            .map(|t| html_escape::decode_html_entities(&t).into_owned()),
                        body_html: item.body,
                        tags: item.tags.into_iter().map(|t| t.to_lowercase()).collect(),
                        score: item.score,
                        accepted_answer_id: item.accepted_answer_id,
                        created_at: unix_to_utc(item.creation_date)?,
                    });
                }
                pages_done += 1;
                page += 1;
                if wrapper.quota_remaining == Some(0) && wrapper.has_more {
                    return quota_stop(fetch, &tag, window, page, config);
                }
                if !wrapper.has_more {
                    break;
                }
            }
            PageOutcome::Quota => return quota_stop(fetch, &tag, window, page, config),
            PageOutcome::Failed(reason) => {
                fetch.status = FetchStatus::Partial { reason };
                return Ok(fetch);
            }
        }
    }

    if config.fetch_answers {
        for chunk in question_ids.chunks(100) {
            let ids = chunk
                .iter()
                .map(u64::to_string)
                .collect::<Vec<_>>()
                .join(";");
            let mut answer_page = 1;
            loop {
                let url = client.with_common(format!(
                    "{base}/2.3/questions/{ids}/answers?page={answer_page}&order=asc&sort=creation"
                ));
                fetch.answer_requests += 1;
                match client.get::<AnswerItem>(&url) {
                    PageOutcome::Page(wrapper) => {
                        for item in wrapper.items {
                            fetch.posts.push(RawPost {
                                post_id: item.answer_id,
                                kind: PostKind::Answer,
                                parent_id: Some(item.question_id),
                                title: None,
                                body_html: item.body,
                                tags: Vec::new(),
                                score: item.score,
                                accepted_answer_id: None,
                                created_at: unix_to_utc(item.creation_date)?,
                            });
                        }
                        if !wrapper.has_more {
                            break;
                        }
                        answer_page += 1;
                    }
                    PageOutcome::Quota => {
                        fetch.status = FetchStatus::Partial {
                            reason: "quota exhausted while fetching answers".into(),
                        };
                        return Ok(fetch);
                    }
                    PageOutcome::Failed(reason) => {
                        fetch.status = FetchStatus::Partial { reason };
                        return Ok(fetch);
                    }
                }
            }
        }
    }
    Ok(fetch)
}

fn quota_stop(
    mut fetch: ApiFetch,
    tag: &str,
    window: &DateWindow,
    next_page: u32,
    config: &ApiClientConfig,
) -> Result<ApiFetch> {
    let cursor = ResumeCursor {
        tag: tag.to_string(),
        window: *window,
        next_page,
    };
    if let Some(path) = &config.cursor_path {
        write_atomic(path, |w| Ok(serde_json::to_writer_pretty(w, &cursor)?))?;
    }
    log::warn!("API quota exhausted; resume at page {next_page}");
    fetch.status = FetchStatus::QuotaExhausted { cursor };
    Ok(fetch)
}
