use std::collections::{HashMap, HashSet};
use std::path::Path;
use std::sync::OnceLock;

use super::porter::porter_stem;
use crate::{Error, Result};

const BUNDLED_STOPWORDS: &str = include_str!("../../resources/stopwords.txt");
const BUNDLED_LEMMAS: &str = include_str!("../../resources/lemmas.tsv");

/// Re-applying the per-token steps to a stem converges in a couple of rounds.
const MAX_CANON_ROUNDS: usize = 8;

/// A normalized token and the form it had just before stemming.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizedToken {
    pub token: String,
    pub surface: String,
}

/// Stopword list and lemma table driving token normalization.
#[derive(Debug, Clone)]
pub struct Normalizer {
    stopwords: HashSet<String>,
    lemmas: HashMap<String, String>,
}

impl Normalizer {
    /// The resources shipped with the crate, parsed once per process.
    pub fn bundled() -> &'static Normalizer {
        static BUNDLED: OnceLock<Normalizer> = OnceLock::new();
        BUNDLED.get_or_init(|| {
            Normalizer::from_strs(BUNDLED_STOPWORDS, BUNDLED_LEMMAS)
                .expect("bundled resources parse")
        })
    }

    /// Load `stopwords.txt` (one word per line) and `lemmas.tsv` (inflected TAB lemma).
    pub fn from_files(stopwords: &Path, lemmas: &Path) -> Result<Self> {
        Self::from_strs(
            &std::fs::read_to_string(stopwords)?,
            &std::fs::read_to_string(lemmas)?,
        )
    }

    pub fn from_strs(stopwords: &str, lemmas: &str) -> Result<Self> {
        let stopwords = stopwords
            .lines()
            .map(|l| l.trim().to_lowercase())
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .collect();
        let mut table = HashMap::new();
        for (idx, line) in lemmas.lines().enumerate() {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let (inflected, lemma) = line.split_once('\t').ok_or_else(|| Error::Parse {
                what: "lemma table",
                line: idx + 1,
                reason: "expected `inflected<TAB>lemma`".into(),
            })?;
            table.insert(inflected.trim().to_lowercase(), lemma.trim().to_lowercase());
        }
        Ok(Self {
            stopwords,
            lemmas: table,
        })
    }

    pub fn is_stopword(&self, word: &str) -> bool {
        self.stopwords.contains(word)
    }

    pub fn lemma<'a>(&'a self, word: &'a str) -> &'a str {
        self.lemmas.get(word).map_or(word, String::as_str)
    }

    /// Normalized tokens of `text`.
    pub fn normalize_tokens(&self, text: &str) -> Vec<String> {
        self.normalize_with_surface(text)
            .into_iter()
            .map(|t| t.token)
            .collect()
    }

    /// Lowercase, split on non-alphanumerics, drop punctuation and stopwords,
    /// lemmatize, Porter-stem, then drop tokens with digits or under two
    /// characters.
    ///
    /// Every emitted token is a fixed point of those per-token steps (a stem is
    /// re-run through them until it stops changing), which makes normalization
    /// idempotent.
    pub fn normalize_with_surface(&self, text: &str) -> Vec<NormalizedToken> {
        let lowered = text.to_lowercase();
        lowered
            .split(|c: char| !c.is_alphanumeric())
            .filter(|t| !t.is_empty() && !t.chars().all(|c| c.is_ascii_punctuation()))
            .filter_map(|raw| {
                let (surface, stem) = self.reduce(raw)?;
                let token = self.canonical(stem)?;
                Some(NormalizedToken {
                    token,
                    surface: surface.to_string(),
                })
            })
            .collect()
    }

    /// Stopword check, lemma lookup and stemming of one lowercase token.
    fn reduce<'a>(&'a self, raw: &'a str) -> Option<(&'a str, String)> {
        if self.is_stopword(raw) {
            return None;
        }
        let lemma = self.lemma(raw);
        let stem = porter_stem(lemma);
        if stem.chars().count() < 2 || stem.chars().any(|c| c.is_numeric()) {
            return None;
        }
        Some((lemma, stem))
    }

    fn canonical(&self, mut stem: String) -> Option<String> {
        for _ in 0..MAX_CANON_ROUNDS {
            let (_, next) = self.reduce(&stem)?;
            if next == stem {
                return Some(stem);
            }
            stem = next;
        }
        Some(stem)
    }
}
