//! Run every stage on a dump, then run again to show the stage cache.
//!
//! ```bash
//! cargo run --release --example full_pipeline -- Posts.xml out/
//! ```

use std::path::PathBuf;

use apitopics::pipeline::{Pipeline, PipelineConfig};

fn main() -> anyhow::Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let mut args = std::env::args().skip(1);
    let dump = args.next().map(PathBuf::from).unwrap_or_else(|| {
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/posts_fixture.xml")
    });
    let out = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("apitopics-example"));

    let mut config = PipelineConfig::new(&dump, &out, 42);
    config.hdbscan.min_cluster_size = 5;

    for round in ["first run", "second run"] {
        let mut pipeline = Pipeline::open(config.clone())?;
        println!("{round}:");
        for outcome in pipeline.run_all(false)? {
            println!(
                "  {:<10} {:?} {}",
                outcome.stage,
                outcome.run,
                outcome.outputs.join(", ")
            );
        }
    }
    println!("reports in {}", out.join("reports").display());
    Ok(())
}
