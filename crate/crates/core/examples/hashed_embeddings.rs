//! Embed the fixture questions with the hashed TF-IDF baseline and list each
//! question's nearest neighbour by cosine similarity.

use std::path::PathBuf;

use apitopics::corpus::{filter_corpus, parse_dump_rows, DateWindow, RawPost};
use apitopics::embedding::{embed_corpus, EmbeddingProviderConfig};
use apitopics::text::{prepare_documents, Normalizer};

fn main() -> anyhow::Result<()> {
    let dump = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/posts_fixture.xml");
    let posts: Vec<RawPost> =
        parse_dump_rows(std::fs::File::open(dump)?).collect::<Result<_, _>>()?;
    let (posts, _) = filter_corpus(&posts, "android", &DateWindow::default());
    let docs = prepare_documents(&posts, Normalizer::bundled());

    let config = EmbeddingProviderConfig::default();
    let m = embed_corpus(&docs, &config)?;
    println!("{} documents x {} hashed dimensions", m.n_rows, m.dim);

    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    for i in 0..8 {
        let (best, sim) = (0..m.n_rows)
            .filter(|&j| j != i)
            .map(|j| (j, dot(m.row(i), m.row(j))))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        println!(
            "{:<55} ~ {:<55} {sim:.3}",
            docs[i].title.as_deref().unwrap_or(""),
            docs[best].title.as_deref().unwrap_or("")
        );
    }
    Ok(())
}
