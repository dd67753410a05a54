use std::collections::HashMap;
use std::hash::Hasher;

use fnv::FnvHasher;

use super::EmbeddingMatrix;
use crate::{Error, Result};

pub const MIN_HASHED_DIM: usize = 16;

/// Bucket and sign of a term. FNV-1a over the UTF-8 bytes: stable across runs
/// and platforms.
pub fn term_bucket(term: &str, dim: usize) -> (usize, f64) {
    let mut hasher = FnvHasher::default();
    hasher.write(term.as_bytes());
    let h = hasher.finish();
    let bucket = (h % dim as u64) as usize;
    let sign = if h >> 63 == 0 { 1.0 } else { -1.0 };
    (bucket, sign)
}

/// Hashed TF-IDF vectors, one L2-normalized row per token list.
///
/// Weight of a term is `tf * idf` with `idf = ln((1 + N) / (1 + df)) + 1`;
/// terms are folded into `dim` buckets with a ±1 sign. Empty token lists
/// (or rows that cancel to zero) stay all-zero and are listed in
/// [`EmbeddingMatrix::zero_rows`].
pub fn hashed_tfidf_embed<D, S>(docs: &[D], dim: usize) -> Result<EmbeddingMatrix>
where
    D: AsRef<[S]>,
    S: AsRef<str>,
{
    if dim < MIN_HASHED_DIM {
        return Err(Error::InvalidInput(format!(
            "hashed embedding dim must be >= {MIN_HASHED_DIM}, got {dim}"
        )));
    }
    let n = docs.len();
    let mut df: HashMap<&str, usize> = HashMap::new();
    let mut term_counts: Vec<Vec<(&str, usize)>> = Vec::with_capacity(n);
    for doc in docs {
        let mut tf: HashMap<&str, usize> = HashMap::new();
        for tok in doc.as_ref() {
            *tf.entry(tok.as_ref()).or_default() += 1;
        }
        for term in tf.keys() {
            *df.entry(term).or_default() += 1;
        }
        let mut tf: Vec<(&str, usize)> = tf.into_iter().collect();
        // fixed summation order keeps rows bit-identical across runs
        tf.sort_unstable();
        term_counts.push(tf);
    }

    let mut values = vec![0.0; n * dim];
    let mut zero_rows = Vec::new();
    for (i, tf) in term_counts.iter().enumerate() {
        let row = &mut values[i * dim..(i + 1) * dim];
        for &(term, count) in tf {
            let idf = ((1.0 + n as f64) / (1.0 + df[term] as f64)).ln() + 1.0;
            let (bucket, sign) = term_bucket(term, dim);
            row[bucket] += sign * count as f64 * idf;
        }
        let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 0.0 {
            row.iter_mut().for_each(|v| *v /= norm);
        } else {
            zero_rows.push(i);
        }
    }
    Ok(EmbeddingMatrix {
        n_rows: n,
        dim,
        values,
        zero_rows,
    })
}
