use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use super::{ExtractedSentence, TopicReport};
use crate::util::write_atomic;
use crate::Result;

fn table_cell(sentences: &[ExtractedSentence]) -> String {
    let mut joined = String::new();
    for s in sentences {
        if !joined.is_empty() {
            let ends_clause = joined.trim_end().ends_with(['.', '?', '!', ':', ';']);
            joined.push_str(if ends_clause { " " } else { ": " });
        }
        joined.push_str(&s.text);
    }
    let collapsed = joined.split_whitespace().collect::<Vec<_>>().join(" ");
    let escaped = html_escape::encode_text(&collapsed).replace('|', "\\|");
    if escaped.is_empty() {
        "_(no text)_".to_string()
    } else {
        escaped
    }
}

/// A backtick fence longer than any backtick run inside `code`.
fn fence_for(code: &str) -> String {
    let mut longest = 0;
    let mut run = 0;
    for c in code.chars() {
        if c == '`' {
            run += 1;
            longest = longest.max(run);
        } else {
            run = 0;
        }
    }
    "`".repeat((longest + 1).max(3))
}

/// Markdown page for one topic: a Problem/Solution table with one row per
/// pair, followed by a section per pair holding its code snippets.
pub fn render_markdown(report: &TopicReport) -> String {
    let topic = &report.topic;
    let mut md = String::new();
    let _ = writeln!(md, "# Topic {}: {}\n", topic.topic_id, topic.label);
    let terms: Vec<&str> = topic.top_terms.iter().map(|t| t.surface.as_str()).collect();
    if terms.is_empty() {
        let _ = writeln!(md, "{} questions.\n", topic.size);
    } else {
        let _ = writeln!(
            md,
            "{} questions. Top terms: {}.\n",
            topic.size,
            terms.join(", ")
        );
    }
    if report.pairs.is_empty() {
        md.push_str("No question/answer pair met the score thresholds.\n");
        return md;
    }
    md.push_str("| Problem | Solution |\n| --- | --- |\n");
    for pair in &report.pairs {
        let _ = writeln!(
            md,
            "| {} | {} |",
            table_cell(&pair.problem_summary),
            table_cell(&pair.solution_summary)
        );
    }
    for (i, pair) in report.pairs.iter().enumerate() {
        let _ = writeln!(md, "\n## Pair {}\n", i + 1);
        let accepted = if pair.answer_accepted {
            ", accepted"
        } else {
            ""
        };
        let _ = writeln!(
            md,
            "Question {} (score {}), answer {} (score {}{}).",
            pair.question_id, pair.question_score, pair.answer_id, pair.answer_score, accepted
        );
        for code in &pair.code_snippets {
            let fence = fence_for(code);
            let body = code.trim_end_matches('\n');
            let _ = write!(md, "\n{fence}\n{body}\n{fence}\n");
        }
    }
    md
}

pub fn write_json<W: Write + ?Sized>(out: &mut W, report: &TopicReport) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, report)?;
    out.write_all(b"\n")?;
    Ok(())
}

/// Write `topic_<id>.md` and `topic_<id>.json` into `dir`; returns both paths.
pub fn save_report(dir: &Path, report: &TopicReport) -> Result<(PathBuf, PathBuf)> {
    let id = report.topic.topic_id;
    let md_path = dir.join(format!("topic_{id}.md"));
    let json_path = dir.join(format!("topic_{id}.json"));
    let md = render_markdown(report);
    write_atomic(&md_path, |w| Ok(w.write_all(md.as_bytes())?))?;
    write_atomic(&json_path, |w| write_json(w, report))?;
    Ok((md_path, json_path))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fence_outgrows_inner_backticks() {
        assert_eq!(fence_for("let x = 1;"), "```");
        assert_eq!(fence_for("```\nnested\n```"), "````");
    }

    #[test]
    fn cells_escape_pipes_and_markup() {
        let s = ExtractedSentence {
            text: "a | b <br>\nc".into(),
            source: super::super::SentenceSource::Body,
            start: 0,
            end: 10,
        };
        assert_eq!(table_cell(&[s]), "a \\| b &lt;br&gt; c");
    }
}
