//! Split Stack Exchange HTML bodies into prose and block code.

use html_escape::decode_html_entities;

const BLOCK_TAGS: &[&str] = &[
    "p",
    "div",
    "br",
    "hr",
    "li",
    "ul",
    "ol",
    "h1",
    "h2",
    "h3",
    "h4",
    "h5",
    "h6",
    "blockquote",
    "table",
    "tr",
    "td",
    "th",
    "thead",
    "tbody",
    "dl",
    "dt",
    "dd",
    "img",
];

/// Returns `(prose, code_snippets)`.
///
/// `<pre>` blocks become snippets, in document order and entity-decoded;
/// inline `<code>` keeps its text in the prose. Every other tag is dropped and
/// prose whitespace is collapsed to single spaces. Broken markup is stripped
/// on a best-effort basis.
pub fn split_html(body_html: &str) -> (String, Vec<String>) {
    let mut prose = String::new();
    let mut snippets = Vec::new();
    let mut code = String::new();
    let mut pre_depth = 0usize;

    let mut rest = body_html;
    while !rest.is_empty() {
        let Some(lt) = rest.find('<') else {
            push_text(rest, pre_depth > 0, &mut prose, &mut code);
            break;
        };
        push_text(&rest[..lt], pre_depth > 0, &mut prose, &mut code);
        let after = &rest[lt + 1..];

        if let Some(comment) = after.strip_prefix("!--") {
            rest = match comment.find("-->") {
                Some(end) => &comment[end + 3..],
                None => "",
            };
            continue;
        }
        let starts_tag = after
            .chars()
            .next()
            .is_some_and(|c| c.is_ascii_alphabetic() || c == '/' || c == '!');
        if !starts_tag {
            push_text("<", pre_depth > 0, &mut prose, &mut code);
            rest = after;
            continue;
        }
        let Some(gt) = after.find('>') else {
            // unterminated tag: drop the remainder
            break;
        };
        let tag = &after[..gt];
        rest = &after[gt + 1..];

        let closing = tag.starts_with('/');
        let name: String = tag
            .trim_start_matches('/')
            .chars()
            .take_while(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase();

        if name == "pre" {
            if closing {
                if pre_depth > 0 {
                    pre_depth -= 1;
                    if pre_depth == 0 {
                        flush_snippet(&mut code, &mut snippets);
                        prose.push(' ');
                    }
                }
            } else {
                if pre_depth == 0 {
                    prose.push(' ');
                }
                pre_depth += 1;
            }
        } else if pre_depth == 0 && BLOCK_TAGS.contains(&name.as_str()) {
            prose.push(' ');
        }
    }
    if pre_depth > 0 {
        flush_snippet(&mut code, &mut snippets);
    }

    (collapse_whitespace(&prose), snippets)
}

fn push_text(raw: &str, in_pre: bool, prose: &mut String, code: &mut String) {
    if raw.is_empty() {
        return;
    }
    let decoded = decode_html_entities(raw);
    if in_pre {
        code.push_str(&decoded);
    } else {
        prose.push_str(&decoded);
    }
}

fn flush_snippet(code: &mut String, snippets: &mut Vec<String>) {
    if !code.trim().is_empty() {
        snippets.push(std::mem::take(code));
    }
    code.clear();
}

fn collapse_whitespace(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}
