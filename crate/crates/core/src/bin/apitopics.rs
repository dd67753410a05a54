use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use apitopics::pipeline::{Pipeline, PipelineConfig, RunKind, Stage, StageOutcome};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

/// Topic modeling and problem/solution summaries for Stack Overflow posts.
#[derive(Parser)]
#[command(name = "apitopics", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Read Posts.xml (or the API) and keep the tag and date window.
    Ingest,
    /// Clean HTML, split sentences, normalize tokens.
    Prep,
    /// Embed documents.
    Embed,
    /// Reduce embeddings with UMAP.
    Reduce,
    /// Cluster documents with HDBSCAN.
    Cluster,
    /// Compute c-TF-IDF topics and word scores.
    Topics,
    /// Select question/answer pairs and summarize them.
    Summarize,
    /// Render Markdown reports and the word-score plot.
    Report,
    /// Run every stage in order.
    RunAll,
}

#[derive(Clone, Copy, ValueEnum)]
enum Embedder {
    Hashed,
    File,
    Remote,
}

#[derive(Clone, Copy, ValueEnum)]
enum Space {
    Reduced,
    Original,
}

#[derive(clap::Args)]
struct Opts {
    /// JSON configuration file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Stack Exchange data dump Posts.xml.
    #[arg(long, global = true)]
    dump: Option<PathBuf>,
    /// Fetch posts from the Stack Exchange API instead of a dump.
    #[arg(long, global = true)]
    api: bool,
    /// Question tag to keep [default: android].
    #[arg(long, global = true)]
    tag: Option<String>,
    /// First day kept, YYYY-MM or YYYY-MM-DD.
    #[arg(long, global = true)]
    from: Option<String>,
    /// Last day kept, YYYY-MM or YYYY-MM-DD.
    #[arg(long, global = true)]
    to: Option<String>,
    /// Document embedder [default: hashed].
    #[arg(long, value_enum, global = true)]
    embedder: Option<Embedder>,
    /// Base URL of the remote embedding server.
    #[arg(long, global = true)]
    endpoint: Option<String>,
    /// Precomputed embeddings file for `--embedder file`.
    #[arg(long, global = true)]
    embeddings_file: Option<PathBuf>,
    /// Dimension of the hashed embedder.
    #[arg(long, global = true)]
    dim: Option<usize>,
    /// Smallest HDBSCAN cluster [default: 10].
    #[arg(long, global = true)]
    min_cluster_size: Option<usize>,
    /// Minimum question score for summaries [default: 3].
    #[arg(long, global = true)]
    min_question_score: Option<i64>,
    /// Minimum score of a non-accepted answer [default: 2].
    #[arg(long, global = true)]
    min_answer_score: Option<i64>,
    /// Question/answer pairs per topic [default: 5].
    #[arg(long, global = true)]
    max_pairs: Option<usize>,
    /// Random seed; required here or in the config file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Cluster the UMAP output or the raw embeddings [default: reduced].
    #[arg(long, value_enum, global = true)]
    cluster_space: Option<Space>,
    /// Output directory [default: out].
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Ignore stale upstream artifacts and cached results.
    #[arg(long, global = true)]
    force: bool,
}

fn set(map: &mut Map<String, Value>, path: &[&str], value: Value) {
    match path {
        [key] => {
            map.insert((*key).to_string(), value);
        }
        [key, rest @ ..] => {
            let child = map.entry((*key).to_string()).or_insert_with(|| json!({}));
            if let Value::Object(inner) = child {
                set(inner, rest, value);
            }
        }
        [] => {}
    }
}

impl Opts {
    fn overrides(&self) -> Value {
        let mut m = Map::new();
        if let Some(v) = &self.dump {
            set(&mut m, &["corpus"], json!(v));
        }
        if self.api {
            set(&mut m, &["api"], json!({}));
        }
        if let Some(v) = &self.tag {
            set(&mut m, &["tag"], json!(v));
        }
        if let Some(v) = &self.from {
            set(&mut m, &["from"], json!(v));
        }
        if let Some(v) = &self.to {
            set(&mut m, &["to"], json!(v));
        }
        if let Some(e) = self.embedder {
            let kind = match e {
                Embedder::Hashed => "hashed_tfidf",
                Embedder::File => "precomputed_file",
                Embedder::Remote => "remote_http",
            };
            set(&mut m, &["embedding", "kind"], json!(kind));
        }
        if let Some(v) = &self.endpoint {
            set(&mut m, &["embedding", "endpoint"], json!(v));
        }
        if let Some(v) = &self.embeddings_file {
            set(&mut m, &["embedding", "path"], json!(v));
        }
        if let Some(v) = self.dim {
            set(&mut m, &["embedding", "dim"], json!(v));
        }
        if let Some(v) = self.min_cluster_size {
            set(&mut m, &["hdbscan", "min_cluster_size"], json!(v));
        }
        if let Some(v) = self.min_question_score {
            set(&mut m, &["summary", "q_min"], json!(v));
        }
        if let Some(v) = self.min_answer_score {
            set(&mut m, &["summary", "a_min"], json!(v));
        }
        if let Some(v) = self.max_pairs {
            set(&mut m, &["summary", "max_pairs"], json!(v));
        }
        if let Some(v) = self.seed {
            set(&mut m, &["seed"], json!(v));
        }
        if let Some(s) = self.cluster_space {
            let name = match s {
                Space::Reduced => "reduced",
                Space::Original => "original",
            };
            set(&mut m, &["cluster_space"], json!(name));
        }
        if let Some(v) = &self.out {
            set(&mut m, &["out"], json!(v));
        }
        Value::Object(m)
    }
}

fn print_outcome(o: &StageOutcome) {
    let status = match o.run {
        RunKind::Executed => "done",
        RunKind::CacheHit => "cached",
    };
    println!("{:<10} {:<7} {}", o.stage, status, o.outputs.join(", "));
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let config = PipelineConfig::load(cli.opts.config.as_deref(), cli.opts.overrides())?;
    let mut pipeline = Pipeline::open(config).context("cannot open output directory")?;
    let force = cli.opts.force;
    let stage = match cli.command {
        Command::RunAll => {
            for stage in Stage::ALL {
                print_outcome(&pipeline.run_stage(stage, force)?);
            }
            return Ok(());
        }
        Command::Ingest => Stage::Ingest,
        Command::Prep => Stage::Prep,
        Command::Embed => Stage::Embed,
        Command::Reduce => Stage::Reduce,
        Command::Cluster => Stage::Cluster,
        Command::Topics => Stage::Topics,
        Command::Summarize => Stage::Summarize,
        Command::Report => Stage::Report,
    };
    print_outcome(&pipeline.run_stage(stage, force)?);
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
