//! Seeded synthetic data: Gaussian blobs and planted-topic Q&A corpora.
//!
//! Used by the examples and tests to exercise reduction, clustering and the
//! full pipeline without external data.

use chrono::{Duration, TimeZone, Utc};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::corpus::{PostKind, RawPost};

#[derive(Debug, Clone)]
pub struct Blobs {
    pub points: Vec<Vec<f64>>,
    pub labels: Vec<usize>,
    pub centers: Vec<Vec<f64>>,
}

impl Blobs {
    /// Row-major copy of `points`.
    pub fn flat(&self) -> Vec<f64> {
        self.points.iter().flatten().copied().collect()
    }

    pub fn dim(&self) -> usize {
        self.centers.first().map_or(0, Vec::len)
    }
}

/// `n_blobs` isotropic Gaussian blobs of `per_blob` points each. Centers are
/// drawn uniformly from a box and redrawn until every pair is at least
/// `min_center_dist` apart. Points are grouped by blob.
pub fn gaussian_blobs(
    n_blobs: usize,
    per_blob: usize,
    dim: usize,
    sigma: f64,
    min_center_dist: f64,
    seed: u64,
) -> Blobs {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let side = min_center_dist * (n_blobs.max(2) as f64);
    let mut centers: Vec<Vec<f64>> = Vec::with_capacity(n_blobs);
    while centers.len() < n_blobs {
        let candidate: Vec<f64> = (0..dim).map(|_| rng.gen_range(0.0..side)).collect();
        let far_enough = centers.iter().all(|c| {
            c.iter()
                .zip(&candidate)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt()
                >= min_center_dist
        });
        if far_enough {
            centers.push(candidate);
        }
    }
    let noise = Normal::new(0.0, sigma).expect("sigma must be finite and non-negative");
    let mut points = Vec::with_capacity(n_blobs * per_blob);
    let mut labels = Vec::with_capacity(n_blobs * per_blob);
    for (label, center) in centers.iter().enumerate() {
        for _ in 0..per_blob {
            points.push(center.iter().map(|c| c + noise.sample(&mut rng)).collect());
            labels.push(label);
        }
    }
    Blobs {
        points,
        labels,
        centers,
    }
}

/// `n` points uniform in the unit square.
pub fn uniform_square(n: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| vec![rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0)])
        .collect()
}

const SYLLABLES: &[&str] = &[
    "ka", "lo", "mi", "nu", "pe", "ra", "si", "to", "vu", "ze", "bo", "da", "fi", "gu", "ha", "jo",
];

/// Synthetic questions drawn from vocabulary-disjoint topic generators.
#[derive(Debug, Clone)]
pub struct PlantedCorpus {
    pub posts: Vec<RawPost>,
    /// Planted topic of each question, in question order.
    pub question_topics: Vec<usize>,
    /// Vocabulary of each topic.
    pub vocabularies: Vec<Vec<String>>,
}

/// Build `n_questions` questions tagged `android`, each drawn from one of
/// `n_topics` generators with disjoint `vocab_size`-word vocabularies. Every
/// question gets one answer; scores vary so summarization has work to do.
pub fn planted_topic_corpus(
    n_questions: usize,
    n_topics: usize,
    vocab_size: usize,
    seed: u64,
) -> PlantedCorpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Three-syllable words ending in a consonant-free syllable survive stemming
    // untouched and never collide across topics.
    let mut words: Vec<String> = Vec::new();
    'outer: for a in SYLLABLES {
        for b in SYLLABLES {
            for c in SYLLABLES {
                words.push(format!("{a}{b}{c}x"));
                if words.len() == n_topics * vocab_size {
                    break 'outer;
                }
            }
        }
    }
    words.shuffle(&mut rng);
    let vocabularies: Vec<Vec<String>> = words.chunks(vocab_size).map(<[String]>::to_vec).collect();

    let base = Utc.with_ymd_and_hms(2015, 1, 1, 0, 0, 0).unwrap();
    let mut posts = Vec::with_capacity(2 * n_questions);
    let mut question_topics = Vec::with_capacity(n_questions);
    let mut next_id = 1u64;
    for q in 0..n_questions {
        let topic = q % n_topics;
        let vocab = &vocabularies[topic];
        // Zipf-like preference for the first words of each vocabulary
        let sentence = |rng: &mut ChaCha8Rng, len: usize| -> String {
            let words: Vec<&str> = (0..len)
                .map(|_| {
                    let r: f64 = rng.gen();
                    let idx = ((r * r) * vocab.len() as f64) as usize;
                    vocab[idx.min(vocab.len() - 1)].as_str()
                })
                .collect();
            let mut s = words.join(" ");
            s[..1].make_ascii_uppercase();
            s.push('.');
            s
        };
        let title = sentence(&mut rng, 5);
        let n_sent = rng.gen_range(3..6);
        let body: Vec<String> = (0..n_sent)
            .map(|_| {
                let len = rng.gen_range(6..12);
                sentence(&mut rng, len)
            })
            .collect();
        let question_id = next_id;
        let answer_id = next_id + 1;
        next_id += 2;
        let accepted = rng.gen_bool(0.5);
        let created = base + Duration::hours(q as i64);
        posts.push(RawPost {
            post_id: question_id,
            kind: PostKind::Question,
            parent_id: None,
            title: Some(title.trim_end_matches('.').to_string()),
            body_html: format!("<p>{}</p>", body.join(" ")),
            tags: vec!["android".into()],
            score: rng.gen_range(-1..8),
            accepted_answer_id: accepted.then_some(answer_id),
            created_at: created,
        });
        let n_answer = rng.gen_range(2..5);
        let answer_body: Vec<String> = (0..n_answer)
            .map(|_| {
                let len = rng.gen_range(6..12);
                sentence(&mut rng, len)
            })
            .collect();
        posts.push(RawPost {
            post_id: answer_id,
            kind: PostKind::Answer,
            parent_id: Some(question_id),
            title: None,
            body_html: format!(
                "<p>{}</p><pre><code>{}();\n</code></pre>",
                answer_body.join(" "),
                vocab[0]
            ),
            tags: vec![],
            score: rng.gen_range(0..6),
            accepted_answer_id: None,
            created_at: created + Duration::minutes(30),
        });
        question_topics.push(topic);
    }
    PlantedCorpus {
        posts,
        question_topics,
        vocabularies,
    }
}
