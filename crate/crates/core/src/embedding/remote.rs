//! Client for sentence-embedding servers speaking
//! `POST <endpoint>/embed {"texts": [...]} -> {"vectors": [[...], ...]}`.

use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::corpus::Sleeper;
use crate::{Error, Result};

#[derive(Serialize)]
struct EmbedRequest<'a> {
    texts: &'a [String],
}

#[derive(Deserialize)]
struct EmbedResponse {
    vectors: Vec<Vec<f64>>,
}

pub struct RemoteEmbedder {
    url: String,
    http: reqwest::blocking::Client,
    batch_size: usize,
    max_retries: u32,
    retry_delay: Duration,
}

impl RemoteEmbedder {
    pub fn new(
        endpoint: &str,
        batch_size: usize,
        max_retries: u32,
        timeout: Duration,
    ) -> Result<Self> {
        if batch_size == 0 {
            return Err(Error::InvalidInput("batch_size must be positive".into()));
        }
        Ok(Self {
            url: format!("{}/embed", endpoint.trim_end_matches('/')),
            http: reqwest::blocking::Client::builder()
                .timeout(timeout)
                .build()?,
            batch_size,
            max_retries,
            retry_delay: Duration::from_millis(500),
        })
    }

    pub fn with_retry_delay(mut self, delay: Duration) -> Self {
        self.retry_delay = delay;
        self
    }

    /// Embed `texts` in batches; vectors come back in input order.
    pub fn embed_texts(&self, texts: &[String], sleeper: &dyn Sleeper) -> Result<Vec<Vec<f64>>> {
        let mut out = Vec::with_capacity(texts.len());
        let mut dim = None;
        for (batch_idx, batch) in texts.chunks(self.batch_size).enumerate() {
            let vectors = self.embed_batch(batch_idx, batch, sleeper)?;
            for v in &vectors {
                let expected = *dim.get_or_insert(v.len());
                if v.len() != expected {
                    return Err(Error::DimensionMismatch {
                        expected,
                        found: v.len(),
                    });
                }
                if v.iter().any(|x| !x.is_finite()) {
                    return Err(Error::EmbeddingBatch {
                        batch: batch_idx,
                        reason: "non-finite value in vector".into(),
                    });
                }
            }
            out.extend(vectors);
        }
        Ok(out)
    }

    fn embed_batch(
        &self,
        batch_idx: usize,
        batch: &[String],
        sleeper: &dyn Sleeper,
    ) -> Result<Vec<Vec<f64>>> {
        let mut attempt = 0;
        loop {
            let reason = match self
                .http
                .post(&self.url)
                .json(&EmbedRequest { texts: batch })
                .send()
            {
                Ok(resp) if resp.status().is_success() => match resp.json::<EmbedResponse>() {
                    Ok(body) if body.vectors.len() == batch.len() => return Ok(body.vectors),
                    Ok(body) => {
                        return Err(Error::EmbeddingBatch {
                            batch: batch_idx,
                            reason: format!(
                                "{} vectors for {} texts",
                                body.vectors.len(),
                                batch.len()
                            ),
                        })
                    }
                    Err(e) => format!("undecodable response: {e}"),
                },
                Ok(resp) => format!("HTTP {}", resp.status()),
                Err(e) => e.to_string(),
            };
            if attempt >= self.max_retries {
                return Err(Error::EmbeddingBatch {
                    batch: batch_idx,
                    reason,
                });
            }
            log::warn!("embedding batch {batch_idx} failed ({reason}); retrying");
            sleeper.sleep(self.retry_delay * 2u32.pow(attempt.min(16)));
            attempt += 1;
        }
    }
}
