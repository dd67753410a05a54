//! Topic word scores for a synthetic corpus, written as CSV and SVG.
//!
//! ```bash
//! cargo run --example wordscore_plot -- /tmp/wordscores
//! ```

use std::path::PathBuf;

use apitopics::clustering::ClusterAssignment;
use apitopics::datasets::planted_topic_corpus;
use apitopics::plot::save_wordscore_svg;
use apitopics::text::{prepare_documents, Normalizer};
use apitopics::topics::{build_topics, export_word_scores, save_word_scores, TopicParams};

fn main() -> anyhow::Result<()> {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(std::env::temp_dir);
    std::fs::create_dir_all(&out)?;

    let corpus = planted_topic_corpus(300, 6, 25, 1);
    let docs = prepare_documents(&corpus.posts, Normalizer::bundled());
    // Use the planted topics directly as the cluster assignment.
    let assignment = ClusterAssignment {
        labels: corpus.question_topics.iter().map(|&t| t as i64).collect(),
        k: 6,
        membership_strength: vec![1.0; docs.len()],
    };
    let topics = build_topics(&assignment, &docs, &TopicParams::default())?;
    let rows = export_word_scores(&topics, 12, 5);

    save_word_scores(&out.join("wordscores.csv"), &rows)?;
    save_wordscore_svg(&out.join("wordscores.svg"), &rows)?;
    for t in &topics {
        println!("topic {} ({} docs): {}", t.topic_id, t.size, t.label);
    }
    println!("wrote {}/wordscores.{{csv,svg}}", out.display());
    Ok(())
}
