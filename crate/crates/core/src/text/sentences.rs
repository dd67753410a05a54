use serde::{Deserialize, Serialize};

/// A sentence with character (not byte) offsets into its source text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sentence {
    pub text: String,
    pub start: usize,
    pub end: usize,
}

/// Split plain text into sentences.
///
/// A boundary is a `.`, `!` or `?` followed by whitespace and then an
/// uppercase letter or a digit. A trailing fragment without a terminator is a
/// sentence of its own. Surrounding whitespace is not part of any sentence.
pub fn segment_sentences(prose: &str) -> Vec<Sentence> {
    let chars: Vec<char> = prose.chars().collect();
    let mut out = Vec::new();
    let mut start = 0;
    let mut i = 0;
    while i < chars.len() {
        if matches!(chars[i], '.' | '!' | '?') {
            let mut next = i + 1;
            while next < chars.len() && chars[next].is_whitespace() {
                next += 1;
            }
            let boundary = next > i + 1
                && next < chars.len()
                && (chars[next].is_uppercase() || chars[next].is_ascii_digit());
            if boundary {
                push_span(&chars, start, i + 1, &mut out);
                start = next;
                i = next;
                continue;
            }
        }
        i += 1;
    }
    push_span(&chars, start, chars.len(), &mut out);
    out
}

fn push_span(chars: &[char], mut start: usize, mut end: usize, out: &mut Vec<Sentence>) {
    while start < end && chars[start].is_whitespace() {
        start += 1;
    }
    while end > start && chars[end - 1].is_whitespace() {
        end -= 1;
    }
    if start < end {
        out.push(Sentence {
            text: chars[start..end].iter().collect(),
            start,
            end,
        });
    }
}

/// Character-offset substring, as used by [`Sentence`].
pub fn char_slice(text: &str, start: usize, end: usize) -> String {
    text.chars()
        .skip(start)
        .take(end.saturating_sub(start))
        .collect()
}
