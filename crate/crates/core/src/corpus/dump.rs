//! Streaming reader for Stack Exchange `Posts.xml` dumps.
//!
//! Dumps hold one `<row .../>` element per line (newlines inside bodies are
//! encoded as `&#xA;`), so the reader works line by line and keeps only the
//! current line in memory. Rows that fail to parse go to an error ledger and
//! parsing continues.

use std::io::{BufRead, BufReader, Read, Write};

use chrono::{DateTime, NaiveDateTime, Utc};
use quick_xml::events::Event;
use quick_xml::Reader;
use serde::{Deserialize, Serialize};

use super::{PostKind, RawPost};
use crate::{Error, Result};

/// A row that could not be turned into a [`RawPost`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerEntry {
    /// 1-based line number in the dump.
    pub line: usize,
    pub reason: String,
}

/// Iterator over the posts of a dump. Yields `Err(TruncatedDump)` once, after
/// every parsed row, when the closing `</posts>` tag never shows up.
pub struct DumpReader<R> {
    input: R,
    line_no: usize,
    buf: String,
    ledger: Vec<LedgerEntry>,
    saw_close: bool,
    done: bool,
}

/// Stream posts out of a `Posts.xml` byte stream.
pub fn parse_dump_rows<R: Read>(input: R) -> DumpReader<BufReader<R>> {
    DumpReader::new(BufReader::new(input))
}

impl<R: BufRead> DumpReader<R> {
    pub fn new(input: R) -> Self {
        Self {
            input,
            line_no: 0,
            buf: String::new(),
            ledger: Vec::new(),
            saw_close: false,
            done: false,
        }
    }

    pub fn ledger(&self) -> &[LedgerEntry] {
        &self.ledger
    }

    pub fn into_ledger(self) -> Vec<LedgerEntry> {
        self.ledger
    }

    /// Lines consumed so far.
    pub fn lines_read(&self) -> usize {
        self.line_no
    }

    fn record(&mut self, reason: String) {
        self.ledger.push(LedgerEntry {
            line: self.line_no,
            reason,
        });
    }
}

impl<R: BufRead> Iterator for DumpReader<R> {
    type Item = Result<RawPost>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        loop {
            self.buf.clear();
            match self.input.read_line(&mut self.buf) {
                Ok(0) => {
                    self.done = true;
                    if self.saw_close {
                        return None;
                    }
                    return Some(Err(Error::TruncatedDump {
                        line: self.line_no,
                        reason: "end of input before </posts>".into(),
                    }));
                }
                Ok(_) => self.line_no += 1,
                Err(e) => {
                    self.done = true;
                    return Some(Err(e.into()));
                }
            }
            let line = self.buf.trim();
            if line.is_empty() || line.starts_with("<?xml") || line == "<posts>" {
                continue;
            }
            if line == "</posts>" {
                self.saw_close = true;
                continue;
            }
            if !line.starts_with("<row") {
                let reason = format!("unexpected content {:?}", truncate(line, 40));
                self.record(reason);
                continue;
            }
            match parse_row(line) {
                Ok(Some(post)) => return Some(Ok(post)),
                Ok(None) => continue,
                Err(reason) => self.record(reason),
            }
        }
    }
}

fn truncate(s: &str, max: usize) -> &str {
    match s.char_indices().nth(max) {
        Some((idx, _)) => &s[..idx],
        None => s,
    }
}

#[derive(Default)]
struct RowAttrs {
    id: Option<String>,
    post_type: Option<String>,
    parent_id: Option<String>,
    accepted_answer_id: Option<String>,
    creation_date: Option<String>,
    score: Option<String>,
    body: Option<String>,
    title: Option<String>,
    tags: Option<String>,
}

/// `Ok(None)` for rows of other post types (tag wikis, moderator nominations, ...).
fn parse_row(line: &str) -> std::result::Result<Option<RawPost>, String> {
    let mut reader = Reader::from_str(line);
    let attrs = match reader.read_event() {
        Ok(Event::Empty(start)) if start.name().as_ref() == b"row" => {
            let mut attrs = RowAttrs::default();
            for attr in start.attributes() {
                let attr = attr.map_err(|e| format!("bad attribute: {e}"))?;
                let value = attr
                    .unescape_value()
                    .map_err(|e| format!("bad entity: {e}"))?
                    .into_owned();
                let slot = match attr.key.as_ref() {
                    b"Id" => &mut attrs.id,
                    b"PostTypeId" => &mut attrs.post_type,
                    b"ParentId" => &mut attrs.parent_id,
                    b"AcceptedAnswerId" => &mut attrs.accepted_answer_id,
                    b"CreationDate" => &mut attrs.creation_date,
                    b"Score" => &mut attrs.score,
                    b"Body" => &mut attrs.body,
                    b"Title" => &mut attrs.title,
                    b"Tags" => &mut attrs.tags,
                    _ => continue,
                };
                *slot = Some(value);
            }
            attrs
        }
        Ok(Event::Start(_)) => return Err("row element is not self-closing".into()),
        Ok(other) => return Err(format!("expected <row/>, found {other:?}")),
        Err(e) => return Err(format!("xml error: {e}")),
    };

    let kind = match attrs.post_type.as_deref() {
        Some("1") => PostKind::Question,
        Some("2") => PostKind::Answer,
        Some(_) => return Ok(None),
        None => return Err("missing PostTypeId".into()),
    };
    let post_id = parse_id(attrs.id.as_deref(), "Id")?.ok_or("missing Id")?;
    let score = attrs
        .score
        .as_deref()
        .ok_or("missing Score")?
        .trim()
        .parse::<i64>()
        .map_err(|e| format!("bad Score: {e}"))?;
    let created_at = parse_timestamp(
        attrs
            .creation_date
            .as_deref()
            .ok_or("missing CreationDate")?,
    )?;
    let body_html = attrs.body.unwrap_or_default();

    let post = match kind {
        PostKind::Question => RawPost {
            post_id,
            kind,
            parent_id: None,
            title: attrs.title,
            body_html,
            tags: attrs.tags.as_deref().map(parse_tags).unwrap_or_default(),
            score,
            accepted_answer_id: parse_id(attrs.accepted_answer_id.as_deref(), "AcceptedAnswerId")?,
            created_at,
        },
        PostKind::Answer => RawPost {
            post_id,
            kind,
            parent_id: Some(
                parse_id(attrs.parent_id.as_deref(), "ParentId")?
                    .ok_or("answer without ParentId")?,
            ),
            title: None,
            body_html,
            tags: Vec::new(),
            score,
            accepted_answer_id: None,
            created_at,
        },
    };
    Ok(Some(post))
}

fn parse_id(value: Option<&str>, name: &str) -> std::result::Result<Option<u64>, String> {
    match value {
        None => Ok(None),
        Some(v) => match v.trim().parse::<u64>() {
            Ok(0) => Err(format!("{name} must be positive")),
            Ok(id) => Ok(Some(id)),
            Err(e) => Err(format!("bad {name}: {e}")),
        },
    }
}

pub(crate) fn parse_timestamp(value: &str) -> std::result::Result<DateTime<Utc>, String> {
    let value = value.trim();
    if let Ok(ts) = DateTime::parse_from_rfc3339(value) {
        return Ok(ts.with_timezone(&Utc));
    }
    NaiveDateTime::parse_from_str(value, "%Y-%m-%dT%H:%M:%S%.f")
        .map(|naive| naive.and_utc())
        .map_err(|e| format!("bad CreationDate {value:?}: {e}"))
}

/// Tags come as `<a><b>` in older dumps and `|a|b|` in newer ones.
fn parse_tags(raw: &str) -> Vec<String> {
    raw.split(['<', '>', '|'])
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

fn escape_attr(value: &str) -> String {
    quick_xml::escape::escape(value)
        .replace('\n', "&#xA;")
        .replace('\r', "&#xD;")
}

/// Write posts in the data dump's `Posts.xml` layout.
pub fn write_posts_xml<'a, W, I>(out: &mut W, posts: I) -> Result<()>
where
    W: Write + ?Sized,
    I: IntoIterator<Item = &'a RawPost>,
{
    writeln!(out, "<?xml version=\"1.0\" encoding=\"utf-8\"?>")?;
    writeln!(out, "<posts>")?;
    for p in posts {
        let type_id = if p.is_question() { 1 } else { 2 };
        write!(out, "  <row Id=\"{}\" PostTypeId=\"{type_id}\"", p.post_id)?;
        if let Some(parent) = p.parent_id {
            write!(out, " ParentId=\"{parent}\"")?;
        }
        if let Some(acc) = p.accepted_answer_id {
            write!(out, " AcceptedAnswerId=\"{acc}\"")?;
        }
        write!(
            out,
            " CreationDate=\"{}\" Score=\"{}\" Body=\"{}\"",
            p.created_at.format("%Y-%m-%dT%H:%M:%S%.3f"),
            p.score,
            escape_attr(&p.body_html)
        )?;
        if let Some(title) = &p.title {
            write!(out, " Title=\"{}\"", escape_attr(title))?;
        }
        if !p.tags.is_empty() {
            let tags: String = p.tags.iter().map(|t| format!("<{t}>")).collect();
            write!(out, " Tags=\"{}\"", escape_attr(&tags))?;
        }
        writeln!(out, " />")?;
    }
    writeln!(out, "</posts>")?;
    Ok(())
}
