use std::collections::BTreeSet;
use std::fs::File;
use std::path::PathBuf;

use apitopics::corpus::{
    filter_corpus, parse_dump_rows, CorpusStore, DateWindow, PostKind, RawPost,
};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn row_key(p: &RawPost) -> String {
    let kind = match p.kind {
        PostKind::Question => "question",
        PostKind::Answer => "answer",
    };
    let opt = |v: Option<u64>| v.map(|x| x.to_string()).unwrap_or_default();
    format!(
        "{}\t{kind}\t{}\t{}\t{}\t{}",
        p.post_id,
        opt(p.parent_id),
        p.score,
        opt(p.accepted_answer_id),
        p.tags.join(";")
    )
}

fn parse_fixture() -> (Vec<RawPost>, usize) {
    let mut reader = parse_dump_rows(File::open(fixture("posts_fixture.xml")).unwrap());
    let posts: Vec<RawPost> = reader.by_ref().collect::<Result<_, _>>().unwrap();
    (posts, reader.ledger().len())
}

#[test]
fn fixture_matches_expected_rows() {
    let (posts, skipped) = parse_fixture();
    let expected: BTreeSet<String> = std::fs::read_to_string(fixture("posts_fixture_expected.tsv"))
        .unwrap()
        .lines()
        .skip(1)
        .map(str::to_string)
        .collect();
    let got: BTreeSet<String> = posts.iter().map(row_key).collect();
    assert_eq!(posts.len(), 98);
    assert_eq!(got, expected);
    assert_eq!(skipped, 2);
    assert!(posts.iter().all(|p| p.validate().is_ok()));
}

#[test]
fn store_round_trip_is_exact() {
    let (posts, _) = parse_fixture();
    let dir = tempfile::tempdir().unwrap();
    let store = CorpusStore::new(dir.path().join("corpus.ndjson"));
    assert_eq!(store.write(&posts).unwrap(), posts.len());
    let back: Vec<RawPost> = store.read().unwrap();
    assert_eq!(back, posts);
}

#[test]
fn filtering_keeps_android_questions_and_their_answers() {
    let (posts, _) = parse_fixture();
    let (kept, stats) = filter_corpus(&posts, "android", &DateWindow::default());
    let questions = kept.iter().filter(|p| p.is_question()).count();
    assert_eq!(questions, 60);
    assert_eq!(kept.len() - questions, 38);
    assert_eq!(stats.kept_questions, 60);
    assert_eq!(stats.orphan_answers, 0);
}
