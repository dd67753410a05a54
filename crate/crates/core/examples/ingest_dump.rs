//! Stream a `Posts.xml` dump, keep one tag, and store the result as NDJSON.
//!
//! ```bash
//! cargo run --example ingest_dump -- path/to/Posts.xml android
//! ```
//!
//! Without arguments the bundled 100-row test fixture is used.

use std::path::PathBuf;

use apitopics::corpus::{filter_corpus, parse_dump_rows, CorpusStore, DateWindow, RawPost};

fn main() -> anyhow::Result<()> {
    let mut args = std::env::args().skip(1);
    let dump = args.next().map(PathBuf::from).unwrap_or_else(|| {
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/posts_fixture.xml")
    });
    let tag = args.next().unwrap_or_else(|| "android".to_string());

    let mut reader = parse_dump_rows(std::fs::File::open(&dump)?);
    let posts: Vec<RawPost> = reader.by_ref().collect::<Result<_, _>>()?;
    println!("{}: {} posts parsed", dump.display(), posts.len());
    for entry in reader.ledger() {
        println!("  skipped line {}: {}", entry.line, entry.reason);
    }

    let (kept, stats) = filter_corpus(&posts, &tag, &DateWindow::default());
    println!(
        "tag {tag:?}: {} questions and {} answers kept, {} questions dropped",
        stats.kept_questions, stats.kept_answers, stats.dropped_questions
    );

    let dir = tempfile::tempdir()?;
    let store = CorpusStore::new(dir.path().join("corpus.ndjson"));
    store.write(&kept)?;
    let back: Vec<RawPost> = store.read()?;
    assert_eq!(back, kept);
    println!(
        "round-tripped {} posts through {}",
        back.len(),
        store.path().display()
    );
    Ok(())
}
