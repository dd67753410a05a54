use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::util::euclidean_sq;

const MAX_ITERATIONS: usize = 50;

/// Default summary length for `n` sentences: `min(3, ceil(0.3 n))`.
pub fn default_summary_len(n: usize) -> usize {
    3.min((0.3 * n as f64).ceil() as usize)
}

/// Pick up to `k` representative sentences by k-means over their embeddings
/// and return their indices in original order.
///
/// Sentences with all-zero embeddings are never picked unless `n <= k`, in
/// which case every index is returned.
pub fn extractive_summarize(embeddings: &[Vec<f64>], k: usize, seed: u64) -> Vec<usize> {
    let n = embeddings.len();
    if n <= k {
        return (0..n).collect();
    }
    let candidates: Vec<usize> = (0..n)
        .filter(|&i| embeddings[i].iter().any(|v| *v != 0.0))
        .collect();
    if candidates.len() <= k {
        return candidates;
    }
    let points: Vec<&[f64]> = candidates
        .iter()
        .map(|&i| embeddings[i].as_slice())
        .collect();
    let centroids = kmeans(&points, k, seed);

    let mut picked: Vec<usize> = centroids
        .iter()
        .filter_map(|c| {
            let mut best: Option<(usize, f64)> = None;
            for (local, p) in points.iter().enumerate() {
                let d = euclidean_sq(p, c);
                if best.is_none_or(|(_, bd)| d < bd) {
                    best = Some((local, d));
                }
            }
            best.map(|(local, _)| candidates[local])
        })
        .collect();
    picked.sort_unstable();
    picked.dedup();
    picked
}

fn nearest(point: &[f64], centroids: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, centroid) in centroids.iter().enumerate() {
        let d = euclidean_sq(point, centroid);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

/// Lloyd's algorithm with k-means++ seeding. Empty clusters keep their
/// previous centroid.
fn kmeans(points: &[&[f64]], k: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centroids: Vec<Vec<f64>> = vec![points[rng.gen_range(0..points.len())].to_vec()];
    while centroids.len() < k {
        let d2: Vec<f64> = points.iter().map(|p| nearest(p, &centroids).1).collect();
        let total: f64 = d2.iter().sum();
        let next = if total > 0.0 {
            let mut target = rng.gen::<f64>() * total;
            let mut chosen = d2.iter().rposition(|&d| d > 0.0).unwrap_or(0);
            for (i, &d) in d2.iter().enumerate() {
                if target < d {
                    chosen = i;
                    break;
                }
                target -= d;
            }
            chosen
        } else {
            // every point already coincides with a centroid
            rng.gen_range(0..points.len())
        };
        centroids.push(points[next].to_vec());
    }

    let dim = points[0].len();
    let mut assignment = vec![usize::MAX; points.len()];
    for _ in 0..MAX_ITERATIONS {
        let mut changed = false;
        for (i, p) in points.iter().enumerate() {
            let c = nearest(p, &centroids).0;
            if assignment[i] != c {
                assignment[i] = c;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (p, &c) in points.iter().zip(&assignment) {
            counts[c] += 1;
            sums[c].iter_mut().zip(p.iter()).for_each(|(s, v)| *s += v);
        }
        for c in 0..k {
            if counts[c] > 0 {
                centroids[c] = sums[c].iter().map(|s| s / counts[c] as f64).collect();
            }
        }
    }
    centroids
}
