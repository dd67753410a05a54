//! End-to-end acceptance checks, run without the libtest harness so the
//! PASS/FAIL line of every check is always printed. Exits non-zero if any
//! check failed.

use std::alloc::{GlobalAlloc, Layout, System};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::{Duration, Instant};

use apitopics::clustering::{hdbscan_fit_detailed, HdbscanParams};
use apitopics::corpus::{
    parse_dump_rows, split_html, write_posts_xml, CorpusStore, PostKind, RawPost,
};
use apitopics::datasets::{gaussian_blobs, planted_topic_corpus};
use apitopics::matrix::MatrixView;
use apitopics::pipeline::{Pipeline, PipelineConfig, REPORTS_DIR, TOPICS_FILE};
use apitopics::reduction::{pca_reduce, umap_reduce, UmapParams};
use apitopics::summarize::{
    assemble_report, assemble_reports, render_markdown, CorpusIndex, HashedSentenceEmbedder,
    SentenceSource, SummaryParams, TopicReport,
};
use apitopics::text::{char_slice, porter_stem, CleanDocument, Normalizer};
use apitopics::topics::{c_tf_idf, rank_terms, ClassTermCounts, Topic};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct CountingAlloc;

static CURRENT: AtomicUsize = AtomicUsize::new(0);
static PEAK: AtomicUsize = AtomicUsize::new(0);

unsafe impl GlobalAlloc for CountingAlloc {
    unsafe fn alloc(&self, layout: Layout) -> *mut u8 {
        let p = System.alloc(layout);
        if !p.is_null() {
            let now = CURRENT.fetch_add(layout.size(), Ordering::Relaxed) + layout.size();
            PEAK.fetch_max(now, Ordering::Relaxed);
        }
        p
    }

    unsafe fn dealloc(&self, ptr: *mut u8, layout: Layout) {
        System.dealloc(ptr, layout);
        CURRENT.fetch_sub(layout.size(), Ordering::Relaxed);
    }
}

#[global_allocator]
static ALLOC: CountingAlloc = CountingAlloc;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

/// Adjusted Rand index from the contingency table; every distinct label,
/// noise included, is its own class.
fn ari<A: Ord + Copy, B: Ord + Copy>(a: &[A], b: &[B]) -> f64 {
    let mut table: BTreeMap<(A, B), u64> = BTreeMap::new();
    let mut rows: BTreeMap<A, u64> = BTreeMap::new();
    let mut cols: BTreeMap<B, u64> = BTreeMap::new();
    for (&x, &y) in a.iter().zip(b) {
        *table.entry((x, y)).or_default() += 1;
        *rows.entry(x).or_default() += 1;
        *cols.entry(y).or_default() += 1;
    }
    let c2 = |n: u64| (n * n.saturating_sub(1)) as f64 / 2.0;
    let index: f64 = table.values().map(|&n| c2(n)).sum();
    let sa: f64 = rows.values().map(|&n| c2(n)).sum();
    let sb: f64 = cols.values().map(|&n| c2(n)).sum();
    let expected = sa * sb / c2(a.len() as u64);
    let max = (sa + sb) / 2.0;
    if max == expected {
        return 1.0;
    }
    (index - expected) / (max - expected)
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Mean fraction of each point's `k` nearest neighbours (self excluded)
/// that share its label.
fn knn_purity(points: &[f64], dim: usize, labels: &[usize], k: usize) -> f64 {
    let n = labels.len();
    let row = |i: usize| &points[i * dim..(i + 1) * dim];
    let mut total = 0.0;
    for i in 0..n {
        let mut d: Vec<(f64, usize)> = (0..n)
            .filter(|&j| j != i)
            .map(|j| (euclid(row(i), row(j)), j))
            .collect();
        d.sort_by(|x, y| x.partial_cmp(y).unwrap());
        total += d[..k]
            .iter()
            .filter(|&&(_, j)| labels[j] == labels[i])
            .count() as f64
            / k as f64;
    }
    total / n as f64
}

fn porter_fixture() -> Check {
    let text = fs::read_to_string(fixture("porter_reference.tsv")).map_err(|e| e.to_string())?;
    let pairs: Vec<(&str, &str)> = text.lines().filter_map(|l| l.split_once('\t')).collect();
    ensure(pairs.len() >= 100, || format!("only {} pairs", pairs.len()))?;
    let start = Instant::now();
    let wrong: Vec<_> = pairs.iter().filter(|(w, s)| porter_stem(w) != *s).collect();
    let elapsed = start.elapsed();
    ensure(wrong.is_empty(), || {
        format!("{} mismatches, first {:?}", wrong.len(), wrong[0])
    })?;
    ensure(elapsed < Duration::from_secs(1), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!("{} pairs agree in {elapsed:?}", pairs.len()))
}

fn ctfidf_oracle(classes: &[BTreeMap<String, u64>]) -> Vec<BTreeMap<String, f64>> {
    let total: u64 = classes.iter().flat_map(|c| c.values()).sum();
    let avg = total as f64 / classes.len() as f64;
    classes
        .iter()
        .map(|class| {
            class
                .iter()
                .map(|(term, &count)| {
                    let freq: u64 = classes
                        .iter()
                        .map(|c| c.get(term).copied().unwrap_or(0))
                        .sum();
                    (term.clone(), count as f64 * (1.0 + avg / freq as f64).ln())
                })
                .collect()
        })
        .collect()
}

fn ctfidf_matches_oracle() -> Check {
    let mut worst = 0.0f64;
    for seed in 0..50u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut classes = vec![BTreeMap::<String, u64>::new(); 3];
        for _ in 0..20 {
            let class = rng.gen_range(0..3);
            for _ in 0..rng.gen_range(5..30) {
                let term = format!("t{}", rng.gen_range(0..50));
                *classes[class].entry(term).or_default() += 1;
            }
        }
        let counts = ClassTermCounts::from_counts(classes.clone());
        let got = c_tf_idf(&counts, false);
        let want = ctfidf_oracle(&classes);
        for (g, w) in got.iter().zip(&want) {
            ensure(g.len() == w.len(), || {
                format!("seed {seed}: term sets differ")
            })?;
            for (term, weight) in g {
                worst = worst.max((weight - w[term]).abs());
            }
        }
        ensure(worst <= 1e-9, || {
            format!("seed {seed}: deviation {worst:e}")
        })?;

        let scaled: Vec<BTreeMap<String, u64>> = classes
            .iter()
            .map(|c| c.iter().map(|(t, &n)| (t.clone(), n * 10)).collect())
            .collect();
        let scaled = c_tf_idf(&ClassTermCounts::from_counts(scaled), false);
        for (a, b) in got.iter().zip(&scaled) {
            let names = |r: Vec<(String, f64)>| r.into_iter().map(|(t, _)| t).collect::<Vec<_>>();
            ensure(names(rank_terms(a)) == names(rank_terms(b)), || {
                format!("seed {seed}: ranking changed under x10")
            })?;
        }
    }
    Ok(format!(
        "50 corpora, max deviation {worst:e}; rankings stable under x10"
    ))
}

fn kruskal_weights(points: &[Vec<f64>], min_samples: usize) -> Vec<f64> {
    let n = points.len();
    let core: Vec<f64> = points
        .iter()
        .map(|p| {
            let mut d: Vec<f64> = points.iter().map(|q| euclid(p, q)).collect();
            d.sort_by(|a, b| a.partial_cmp(b).unwrap());
            d[min_samples - 1]
        })
        .collect();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            edges.push((
                euclid(&points[i], &points[j]).max(core[i]).max(core[j]),
                i,
                j,
            ));
        }
    }
    edges.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut out = Vec::new();
    for (w, i, j) in edges {
        let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
        if ri != rj {
            parent[ri] = rj;
            out.push(w);
        }
    }
    out
}

fn hdbscan_blobs() -> Check {
    let params = HdbscanParams::new(10);
    let mut aris = Vec::new();
    for seed in 0..5u64 {
        let blobs = gaussian_blobs(3, 100, 2, 0.05, 1.0, seed);
        let flat = blobs.flat();
        let view = MatrixView::new(blobs.points.len(), 2, &flat).map_err(|e| e.to_string())?;
        let model = hdbscan_fit_detailed(view, &params).map_err(|e| e.to_string())?;
        let score = ari(&model.assignment.labels, &blobs.labels);
        ensure(score >= 0.95, || format!("seed {seed}: ARI {score:.4}"))?;
        let sizes = model.assignment.sizes();
        ensure(sizes.iter().all(|&s| s >= 10), || {
            format!("seed {seed}: sizes {sizes:?}")
        })?;
        let mut prim: Vec<f64> = model.mst.iter().map(|e| e.weight).collect();
        prim.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let kruskal = kruskal_weights(&blobs.points, params.min_samples());
        ensure(prim == kruskal, || {
            format!("seed {seed}: MST edge weights differ from Kruskal")
        })?;
        ensure(
            prim.iter().sum::<f64>() == kruskal.iter().sum::<f64>(),
            || "total weight differs".into(),
        )?;
        aris.push(score);
    }
    Ok(format!(
        "ARI per seed {aris:.3?}; MST equals Kruskal on 300 points"
    ))
}

fn umap_blobs() -> Check {
    let blobs = gaussian_blobs(3, 167, 50, 1.0, 10.0, 4);
    let n = 500;
    let labels = &blobs.labels[..n];
    let flat = &blobs.flat()[..n * 50];
    let view = MatrixView::new(n, 50, flat).map_err(|e| e.to_string())?;
    let params = UmapParams {
        dim_out: 5,
        seed: 17,
        ..UmapParams::default()
    };
    let start = Instant::now();
    let a = umap_reduce(view, &params).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let b = umap_reduce(view, &params).map_err(|e| e.to_string())?;
    ensure(a.values == b.values, || {
        "two runs with one seed differ".into()
    })?;
    ensure(elapsed < Duration::from_secs(60), || {
        format!("took {elapsed:?}")
    })?;
    let pca = pca_reduce(view, 5).map_err(|e| e.to_string())?;
    let umap_purity = knn_purity(&a.values, 5, labels, 10);
    let pca_purity = knn_purity(&pca.values, 5, labels, 10);
    ensure(umap_purity >= pca_purity, || {
        format!("purity {umap_purity:.4} < PCA {pca_purity:.4}")
    })?;
    ensure(umap_purity >= 0.90, || format!("purity {umap_purity:.4}"))?;
    Ok(format!(
        "purity {umap_purity:.4} vs PCA {pca_purity:.4}, {elapsed:.2?}, deterministic"
    ))
}

fn run_pipeline(
    dump: &Path,
    out: &Path,
    seed: u64,
    tweak: impl FnOnce(&mut PipelineConfig),
) -> Result<Pipeline, String> {
    let mut config = PipelineConfig::new(dump, out, seed);
    tweak(&mut config);
    let mut pipeline = Pipeline::open(config).map_err(|e| e.to_string())?;
    pipeline.run_all(false).map_err(|e| format!("{e:#}"))?;
    Ok(pipeline)
}

fn planted_topic_recovery(dir: &Path) -> Check {
    let corpus = planted_topic_corpus(1000, 5, 40, 2024);
    let dump = dir.join("Posts.xml");
    let mut file = fs::File::create(&dump).map_err(|e| e.to_string())?;
    write_posts_xml(&mut file, &corpus.posts).map_err(|e| e.to_string())?;
    drop(file);

    let start = Instant::now();
    let out = dir.join("out");
    run_pipeline(&dump, &out, 11, |_| {})?;
    let elapsed = start.elapsed();

    let topic_of: HashMap<u64, usize> = corpus
        .posts
        .iter()
        .filter(|p| p.is_question())
        .zip(&corpus.question_topics)
        .map(|(p, &t)| (p.post_id, t))
        .collect();
    let docs: Vec<CleanDocument> = load_store(&out, "docs.ndjson")?;
    ensure(docs.len() == 1000, || format!("{} documents", docs.len()))?;
    let topics = read_topics(&out)?;
    let mut cluster = vec![-1i64; docs.len()];
    for t in &topics {
        for &d in &t.member_doc_ids {
            cluster[d] = t.topic_id as i64;
        }
    }
    let truth: Vec<usize> = docs.iter().map(|d| topic_of[&d.source_post_id]).collect();
    let score = ari(&cluster, &truth);
    ensure(topics.len() >= 4, || format!("{} topics", topics.len()))?;
    ensure(score >= 0.8, || format!("ARI {score:.4}"))?;
    for t in &topics {
        let mut votes = [0usize; 5];
        for &d in &t.member_doc_ids {
            votes[truth[d]] += 1;
        }
        let planted = (0..5).max_by_key(|&i| votes[i]).unwrap();
        let words: Vec<&str> = t.label.split('_').collect();
        ensure(words.len() == 4, || {
            format!("label {:?} has {} terms", t.label, words.len())
        })?;
        let vocab = &corpus.vocabularies[planted];
        ensure(words.iter().all(|w| vocab.iter().any(|v| v == w)), || {
            format!("label {:?} leaves vocabulary {planted}", t.label)
        })?;
    }
    ensure(elapsed < Duration::from_secs(300), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!(
        "{} topics, ARI {score:.4}, labels in vocabulary, {elapsed:.2?}",
        topics.len()
    ))
}

struct FixtureRun {
    _dir: tempfile::TempDir,
    out_a: PathBuf,
    out_b: PathBuf,
}

impl FixtureRun {
    fn new() -> Result<Self, String> {
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let out_a = dir.path().join("a");
        let out_b = dir.path().join("b");
        let tweak = |c: &mut PipelineConfig| c.hdbscan.min_cluster_size = 5;
        run_pipeline(&fixture("posts_fixture.xml"), &out_a, 7, tweak)?;
        run_pipeline(&fixture("posts_fixture.xml"), &out_b, 7, tweak)?;
        Ok(Self {
            _dir: dir,
            out_a,
            out_b,
        })
    }

    fn load<T: serde::de::DeserializeOwned>(&self, file: &str) -> Result<Vec<T>, String> {
        load_store(&self.out_a, file)
    }

    fn topics(&self) -> Result<Vec<Topic>, String> {
        read_topics(&self.out_a)
    }

    fn reports(&self) -> Result<Vec<TopicReport>, String> {
        read_reports(&self.out_a)
    }
}

fn load_store<T: serde::de::DeserializeOwned>(out: &Path, file: &str) -> Result<Vec<T>, String> {
    CorpusStore::new(out.join(file))
        .read()
        .map_err(|e| e.to_string())
}

fn read_topics(out: &Path) -> Result<Vec<Topic>, String> {
    let text = fs::read_to_string(out.join(TOPICS_FILE)).map_err(|e| e.to_string())?;
    serde_json::from_str(&text).map_err(|e| e.to_string())
}

fn read_reports(out: &Path) -> Result<Vec<TopicReport>, String> {
    let mut reports = Vec::new();
    for entry in sorted_files(&out.join(REPORTS_DIR))? {
        if entry.extension().is_some_and(|e| e == "json") {
            let text = fs::read_to_string(&entry).map_err(|e| e.to_string())?;
            reports.push(serde_json::from_str(&text).map_err(|e| e.to_string())?);
        }
    }
    Ok(reports)
}

fn sorted_files(dir: &Path) -> Result<Vec<PathBuf>, String> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| e.to_string())?
        .map(|e| e.map(|e| e.path()).map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()?;
    files.sort();
    Ok(files)
}

fn summarizer_filters(out: &Path) -> Check {
    let reports = read_reports(out)?;
    let mut n_pairs = 0;
    for r in &reports {
        for p in &r.pairs {
            ensure(p.question_score >= 3, || {
                format!("question {} scores {}", p.question_id, p.question_score)
            })?;
            ensure(p.answer_accepted || p.answer_score >= 2, || {
                format!("answer {} fails the filter", p.answer_id)
            })?;
            n_pairs += 1;
        }
    }
    ensure(n_pairs > 0, || "no pairs emitted".into())?;

    let posts: Vec<RawPost> = load_store(out, "corpus.ndjson")?;
    let docs: Vec<CleanDocument> = load_store(out, "docs.ndjson")?;
    let topics = read_topics(out)?;
    let embedder = HashedSentenceEmbedder {
        normalizer: Normalizer::bundled(),
        dim: 256,
    };
    let uncapped = |q_min| SummaryParams {
        q_min,
        max_pairs: usize::MAX,
        seed: 7,
        ..SummaryParams::default()
    };
    let base = assemble_reports(&topics, &docs, &posts, &uncapped(3), &embedder)
        .map_err(|e| e.to_string())?;
    let raised = assemble_reports(&topics, &docs, &posts, &uncapped(4), &embedder)
        .map_err(|e| e.to_string())?;
    let (mut n_base, mut n_raised) = (0, 0);
    for (low, high) in base.iter().zip(&raised) {
        for p in &low.pairs {
            ensure(
                p.question_score >= 3 && (p.answer_accepted || p.answer_score >= 2),
                || {
                    format!(
                        "uncapped pair for question {} fails the filter",
                        p.question_id
                    )
                },
            )?;
        }
        let ids: BTreeSet<(u64, u64)> = low
            .pairs
            .iter()
            .map(|p| (p.question_id, p.answer_id))
            .collect();
        for p in &high.pairs {
            ensure(ids.contains(&(p.question_id, p.answer_id)), || {
                format!("q_min 4 adds question {}", p.question_id)
            })?;
        }
        n_base += low.pairs.len();
        n_raised += high.pairs.len();
    }
    Ok(format!("{n_pairs} emitted pairs pass; uncapped q_min 3 -> 4 goes {n_base} -> {n_raised} pairs, none added"))
}

fn extractiveness(run: &FixtureRun) -> Check {
    let posts: Vec<RawPost> = run.load("corpus.ndjson")?;
    let docs: Vec<CleanDocument> = run.load("docs.ndjson")?;
    let index = CorpusIndex::new(&posts);
    let everything = Topic {
        topic_id: 0,
        member_doc_ids: (0..docs.len()).collect(),
        size: docs.len(),
        top_terms: Vec::new(),
        label: "all".into(),
    };
    let params = SummaryParams {
        q_min: i64::MIN,
        a_min: i64::MIN,
        max_pairs: usize::MAX,
        seed: 7,
        ..SummaryParams::default()
    };
    let embedder = HashedSentenceEmbedder {
        normalizer: Normalizer::bundled(),
        dim: 256,
    };
    let full = assemble_report(&everything, &docs, &index, &params, &embedder)
        .map_err(|e| e.to_string())?;
    let mut reports = run.reports()?;
    reports.push(full);

    let mut checked = 0;
    for r in &reports {
        for p in &r.pairs {
            for (post_id, summary) in [
                (p.question_id, &p.problem_summary),
                (p.answer_id, &p.solution_summary),
            ] {
                let post = index
                    .post(post_id)
                    .ok_or_else(|| format!("post {post_id} missing"))?;
                let (prose, _) = split_html(&post.body_html);
                let title = post.title.as_deref().unwrap_or("").trim();
                let mut last: Option<(SentenceSource, usize)> = None;
                for s in summary {
                    let source = match s.source {
                        SentenceSource::Title => title,
                        SentenceSource::Body => prose.as_str(),
                    };
                    ensure(char_slice(source, s.start, s.end) == s.text, || {
                        format!(
                            "post {post_id}: {:?} is not at {}..{}",
                            s.text, s.start, s.end
                        )
                    })?;
                    ensure(last.is_none_or(|l| l < (s.source, s.start)), || {
                        format!("post {post_id}: out of order")
                    })?;
                    last = Some((s.source, s.end));
                    checked += 1;
                }
            }
        }
    }
    let answered = reports.last().map_or(0, |r| r.pairs.len());
    Ok(format!(
        "{checked} sentences extract exactly and in order ({answered} answered questions)"
    ))
}

fn ingestion() -> Check {
    let xml = fs::read(fixture("posts_fixture.xml")).map_err(|e| e.to_string())?;
    let mut reader = parse_dump_rows(xml.as_slice());
    let posts: Vec<RawPost> = reader
        .by_ref()
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let skipped = reader.ledger().len();
    let expected: Vec<String> = fs::read_to_string(fixture("posts_fixture_expected.tsv"))
        .map_err(|e| e.to_string())?
        .lines()
        .skip(1)
        .map(str::to_string)
        .collect();
    let mut got: Vec<String> = posts
        .iter()
        .map(|p| {
            let kind = if p.kind == PostKind::Question {
                "question"
            } else {
                "answer"
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
        })
        .collect();
    got.sort();
    let mut want = expected.clone();
    want.sort();
    ensure(got == want, || {
        format!("parsed {} rows, expected {}", got.len(), want.len())
    })?;
    ensure(skipped == 2, || format!("{skipped} rows skipped"))?;

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let store = CorpusStore::new(dir.path().join("corpus.ndjson"));
    store.write(&posts).map_err(|e| e.to_string())?;
    let back: Vec<RawPost> = store.read().map_err(|e| e.to_string())?;
    ensure(back == posts, || {
        "store round-trip changed the posts".into()
    })?;

    let text = String::from_utf8(xml).map_err(|e| e.to_string())?;
    let rows: Vec<&str> = text
        .lines()
        .filter(|l| l.trim_start().starts_with("<row"))
        .collect();
    let big = format!(
        "<?xml version=\"1.0\" encoding=\"utf-8\"?>\n<posts>\n{}\n</posts>\n",
        std::iter::repeat_n(rows.join("\n"), 10)
            .collect::<Vec<_>>()
            .join("\n")
    );
    let small = format!(
        "<?xml version=\"1.0\" encoding=\"utf-8\"?>\n<posts>\n{}\n</posts>\n",
        rows.join("\n")
    );
    let measure = |input: &str| -> (usize, usize) {
        let base = CURRENT.load(Ordering::SeqCst);
        PEAK.store(base, Ordering::SeqCst);
        let mut count = 0;
        for post in parse_dump_rows(input.as_bytes()) {
            if post.is_ok() {
                count += 1;
            }
        }
        (PEAK.load(Ordering::SeqCst).saturating_sub(base), count)
    };
    let (peak1, n1) = measure(&small);
    let (peak10, n10) = measure(&big);
    ensure(n10 == 10 * n1, || {
        format!("{n10} posts from the 10x dump, {n1} from 1x")
    })?;
    let limit = peak1 + peak1 / 4 + 16 * 1024;
    ensure(peak10 <= limit, || {
        format!("peak {peak10} B at 10x vs {peak1} B at 1x")
    })?;
    Ok(format!(
        "98 posts + 2 ledger entries, lossless store, parse peak {peak1} B (1x) vs {peak10} B (10x)"
    ))
}

fn determinism(run: &FixtureRun) -> Check {
    let mut files = vec![PathBuf::from(TOPICS_FILE)];
    for f in sorted_files(&run.out_a.join(REPORTS_DIR))? {
        files.push(Path::new(REPORTS_DIR).join(f.file_name().unwrap()));
    }
    for f in &files {
        let a = fs::read(run.out_a.join(f)).map_err(|e| e.to_string())?;
        let b = fs::read(run.out_b.join(f)).map_err(|e| e.to_string())?;
        ensure(a == b, || format!("{} differs between runs", f.display()))?;
    }
    Ok(format!(
        "{} files byte-identical across two runs",
        files.len()
    ))
}

fn table_shape(run: &FixtureRun) -> Check {
    let posts: Vec<RawPost> = run.load("corpus.ndjson")?;
    let docs: Vec<CleanDocument> = run.load("docs.ndjson")?;
    let index = CorpusIndex::new(&posts);
    let embedder = HashedSentenceEmbedder {
        normalizer: Normalizer::bundled(),
        dim: 256,
    };
    let params = SummaryParams {
        max_pairs: 2,
        seed: 7,
        ..SummaryParams::default()
    };
    let topic = run.topics()?.into_iter().next().ok_or("no topics")?;
    let report =
        assemble_report(&topic, &docs, &index, &params, &embedder).map_err(|e| e.to_string())?;
    ensure(report.pairs.len() == 2, || {
        format!("{} pairs", report.pairs.len())
    })?;
    let md = render_markdown(&report);

    let lines: Vec<&str> = md.lines().collect();
    let header = lines
        .iter()
        .position(|l| l.trim() == "| Problem | Solution |")
        .ok_or("no table header")?;
    ensure(
        lines.get(header + 1).map(|l| l.trim()) == Some("| --- | --- |"),
        || "no separator row".into(),
    )?;
    let rows: Vec<&str> = lines[header + 2..]
        .iter()
        .take_while(|l| l.starts_with('|'))
        .copied()
        .collect();
    ensure(rows.len() == 2, || format!("{} table rows", rows.len()))?;
    for row in &rows {
        let cells = row.replace("\\|", "").matches('|').count() - 1;
        ensure(cells == 2, || format!("row has {cells} cells: {row}"))?;
    }
    let fences: Vec<&&str> = lines.iter().filter(|l| l.starts_with("```")).collect();
    let snippets: usize = report.pairs.iter().map(|p| p.code_snippets.len()).sum();
    ensure(snippets > 0 && fences.len() == 2 * snippets, || {
        format!("{} fence lines for {snippets} snippets", fences.len())
    })?;
    Ok(format!(
        "2-column table with 2 rows and {snippets} fenced code blocks"
    ))
}

fn main() {
    let mut results: Vec<(&str, Check)> = vec![
        ("1 stemmer reference vocabulary", porter_fixture()),
        ("2 c-TF-IDF oracle", ctfidf_matches_oracle()),
        ("3 HDBSCAN blobs", hdbscan_blobs()),
        ("4 UMAP blobs", umap_blobs()),
    ];
    let planted = tempfile::tempdir().expect("temporary directory");
    results.push((
        "5 planted topic recovery",
        planted_topic_recovery(planted.path()),
    ));
    match FixtureRun::new() {
        Ok(run) => {
            let filters = summarizer_filters(&run.out_a).and_then(|fixture| {
                let synthetic = summarizer_filters(&planted.path().join("out"))?;
                Ok(format!("fixture: {fixture}; planted corpus: {synthetic}"))
            });
            results.push(("6 summarizer filters", filters));
            results.push(("7 extractiveness", extractiveness(&run)));
            results.push(("8 ingestion", ingestion()));
            results.push(("9 determinism", determinism(&run)));
            results.push(("10 report table", table_shape(&run)));
        }
        Err(e) => {
            for name in [
                "6 summarizer filters",
                "7 extractiveness",
                "9 determinism",
                "10 report table",
            ] {
                results.push((name, Err(format!("fixture pipeline failed: {e}"))));
            }
            results.push(("8 ingestion", ingestion()));
        }
    }
    let mut failed = 0;
    for (name, result) in &results {
        match result {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name}: {detail}");
            }
        }
    }
    println!(
        "{} of {} acceptance checks passed",
        results.len() - failed,
        results.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
