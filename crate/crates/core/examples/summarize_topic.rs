//! Build a problem/solution report for the gradle questions of the fixture
//! and print it as Markdown.

use std::path::PathBuf;

use apitopics::corpus::{filter_corpus, parse_dump_rows, DateWindow, RawPost};
use apitopics::summarize::{
    assemble_report, render_markdown, CorpusIndex, HashedSentenceEmbedder, SummaryParams,
};
use apitopics::text::{prepare_documents, Normalizer};
use apitopics::topics::Topic;

fn main() -> anyhow::Result<()> {
    let dump = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/posts_fixture.xml");
    let posts: Vec<RawPost> =
        parse_dump_rows(std::fs::File::open(dump)?).collect::<Result<_, _>>()?;
    let (posts, _) = filter_corpus(&posts, "android", &DateWindow::default());
    let normalizer = Normalizer::bundled();
    let docs = prepare_documents(&posts, normalizer);

    let index = CorpusIndex::new(&posts);
    let members: Vec<usize> = docs
        .iter()
        .filter(|d| {
            index
                .post(d.source_post_id)
                .is_some_and(|p| p.tags.iter().any(|t| t == "gradle"))
        })
        .map(|d| d.doc_id)
        .collect();
    let topic = Topic {
        topic_id: 0,
        size: members.len(),
        member_doc_ids: members,
        top_terms: Vec::new(),
        label: "gradle".into(),
    };

    let params = SummaryParams {
        max_pairs: 3,
        seed: 42,
        ..SummaryParams::default()
    };
    let embedder = HashedSentenceEmbedder {
        normalizer,
        dim: 256,
    };
    let report = assemble_report(&topic, &docs, &index, &params, &embedder)?;
    print!("{}", render_markdown(&report));
    Ok(())
}
