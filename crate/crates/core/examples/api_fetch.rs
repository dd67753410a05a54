//! Fetch one page of recent questions for a tag from the Stack Exchange API.
//! Needs network access; a key raises the daily quota.
//!
//! ```bash
//! cargo run --example api_fetch -- android 2023-04 [KEY]
//! ```

use apitopics::corpus::{fetch_api_pages, ApiClientConfig, DateWindow, FetchStatus, ThreadSleeper};

fn main() -> anyhow::Result<()> {
    let mut args = std::env::args().skip(1);
    let tag = args.next().unwrap_or_else(|| "android".into());
    let month = args.next().unwrap_or_else(|| "2023-04".into());
    let window = DateWindow::new(
        DateWindow::parse_bound(&month, false)?,
        DateWindow::parse_bound(&month, true)?,
    )?;
    let config = ApiClientConfig {
        key: args.next(),
        page_size: 20,
        max_pages: Some(1),
        ..ApiClientConfig::default()
    };

    let fetch = fetch_api_pages(&tag, &window, &config, &ThreadSleeper)?;
    match &fetch.status {
        FetchStatus::Complete => {}
        FetchStatus::Partial { reason } => println!("partial result: {reason}"),
        FetchStatus::QuotaExhausted { cursor } => {
            println!("quota exhausted, resume at page {}", cursor.next_page)
        }
    }
    for post in fetch.posts.iter().filter(|p| p.is_question()) {
        println!(
            "{:>10} {:>4}  {}",
            post.post_id,
            post.score,
            post.title.as_deref().unwrap_or("")
        );
    }
    println!(
        "{} posts from {} question and {} answer requests",
        fetch.posts.len(),
        fetch.question_requests,
        fetch.answer_requests
    );
    Ok(())
}
