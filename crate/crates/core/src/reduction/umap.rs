use std::collections::HashMap;

use log::debug;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{pca::fit_pca, ReducedEmbedding};
use crate::matrix::MatrixView;
use crate::util::euclidean;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct UmapParams {
    /// Neighborhood size, counting the point itself.
    pub n_neighbors: usize,
    pub min_dist: f64,
    pub spread: f64,
    pub dim_out: usize,
    pub n_epochs: usize,
    pub negative_sample_rate: usize,
    pub learning_rate: f64,
    pub repulsion_strength: f64,
    pub seed: u64,
}

impl Default for UmapParams {
    fn default() -> Self {
        Self {
            n_neighbors: 15,
            min_dist: 0.1,
            spread: 1.0,
            dim_out: 5,
            n_epochs: 200,
            negative_sample_rate: 5,
            learning_rate: 1.0,
            repulsion_strength: 1.0,
            seed: 42,
        }
    }
}

impl UmapParams {
    pub fn validate(&self) -> Result<()> {
        if self.n_neighbors < 2 {
            return Err(Error::InvalidInput("n_neighbors must be at least 2".into()));
        }
        if self.dim_out == 0 {
            return Err(Error::InvalidInput("dim_out must be positive".into()));
        }
        if !(self.min_dist >= 0.0 && self.spread > 0.0 && self.min_dist <= self.spread) {
            return Err(Error::InvalidInput(format!(
                "need 0 <= min_dist <= spread, got min_dist {} spread {}",
                self.min_dist, self.spread
            )));
        }
        if self.n_epochs == 0 {
            return Err(Error::InvalidInput("n_epochs must be positive".into()));
        }
        Ok(())
    }
}

/// Least-squares fit of `1 / (1 + a x^(2b))` to the offset exponential
/// membership curve defined by `spread` and `min_dist`, using
/// Levenberg-Marquardt.
pub fn fit_curve_params(spread: f64, min_dist: f64) -> (f64, f64) {
    let xs: Vec<f64> = (0..300).map(|i| 3.0 * spread * i as f64 / 299.0).collect();
    let ys: Vec<f64> = xs
        .iter()
        .map(|&x| {
            if x < min_dist {
                1.0
            } else {
                (-(x - min_dist) / spread).exp()
            }
        })
        .collect();
    let residuals = |a: f64, b: f64| -> f64 {
        xs.iter()
            .zip(&ys)
            .map(|(&x, &y)| {
                let r = 1.0 / (1.0 + a * x.powf(2.0 * b)) - y;
                r * r
            })
            .sum()
    };
    let (mut a, mut b) = (1.0f64, 1.0f64);
    let mut lambda = 1e-3;
    let mut cost = residuals(a, b);
    for _ in 0..500 {
        // normal equations J^T J and J^T r
        let (mut jaa, mut jab, mut jbb, mut ga, mut gb) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for (&x, &y) in xs.iter().zip(&ys) {
            if x == 0.0 {
                continue;
            }
            let p = x.powf(2.0 * b);
            let denom = 1.0 + a * p;
            let f = 1.0 / denom;
            let r = f - y;
            let da = -p / (denom * denom);
            let db = -a * p * 2.0 * x.ln() / (denom * denom);
            jaa += da * da;
            jab += da * db;
            jbb += db * db;
            ga += da * r;
            gb += db * r;
        }
        let m00 = jaa * (1.0 + lambda);
        let m11 = jbb * (1.0 + lambda);
        let det = m00 * m11 - jab * jab;
        if det.abs() < 1e-300 {
            break;
        }
        let step_a = -(m11 * ga - jab * gb) / det;
        let step_b = -(m00 * gb - jab * ga) / det;
        let (na, nb) = (a + step_a, b + step_b);
        let new_cost = if na > 0.0 && nb > 0.0 {
            residuals(na, nb)
        } else {
            f64::INFINITY
        };
        if new_cost < cost {
            let done = (cost - new_cost) < 1e-15 * cost.max(1e-300);
            a = na;
            b = nb;
            cost = new_cost;
            lambda *= 0.3;
            if done {
                break;
            }
        } else {
            lambda *= 10.0;
            if lambda > 1e12 {
                break;
            }
        }
    }
    (a, b)
}

struct Knn {
    indices: Vec<Vec<usize>>,
    distances: Vec<Vec<f64>>,
}

/// Exact neighbor lists of size `k`, self first.
fn exact_knn(x: MatrixView<'_>, k: usize) -> Knn {
    let n = x.rows();
    let mut indices = Vec::with_capacity(n);
    let mut distances = Vec::with_capacity(n);
    for i in 0..n {
        let mut row: Vec<(f64, bool, usize)> = (0..n)
            .map(|j| (euclidean(x.row(i), x.row(j)), j != i, j))
            .collect();
        row.sort_by(|p, q| p.partial_cmp(q).expect("finite distances"));
        row.truncate(k);
        indices.push(row.iter().map(|r| r.2).collect());
        distances.push(row.iter().map(|r| r.0).collect());
    }
    Knn { indices, distances }
}

/// Per-point (sigma, rho) so that the neighbor memberships sum to `log2(k)`.
fn smooth_knn(distances: &[Vec<f64>], k: usize) -> Vec<(f64, f64)> {
    let target = (k as f64).log2();
    let all: Vec<f64> = distances
        .iter()
        .flat_map(|d| d.iter().skip(1).copied())
        .collect();
    let global_mean = all.iter().sum::<f64>() / all.len().max(1) as f64;
    distances
        .iter()
        .map(|row| {
            let others = &row[1..];
            let rho = others.iter().copied().find(|&d| d > 0.0).unwrap_or(0.0);
            let (mut lo, mut hi, mut mid) = (0.0f64, f64::INFINITY, 1.0f64);
            for _ in 0..64 {
                let psum: f64 = others
                    .iter()
                    .map(|&d| {
                        let shifted = d - rho;
                        if shifted > 0.0 {
                            (-shifted / mid).exp()
                        } else {
                            1.0
                        }
                    })
                    .sum();
                if (psum - target).abs() < 1e-5 {
                    break;
                }
                if psum > target {
                    hi = mid;
                    mid = (lo + hi) / 2.0;
                } else {
                    lo = mid;
                    mid = if hi.is_infinite() {
                        mid * 2.0
                    } else {
                        (lo + hi) / 2.0
                    };
                }
            }
            let local_mean = others.iter().sum::<f64>() / others.len().max(1) as f64;
            let floor = if rho > 0.0 {
                1e-3 * local_mean
            } else {
                1e-3 * global_mean
            };
            (mid.max(floor).max(1e-12), rho)
        })
        .collect()
}

/// Symmetrized fuzzy graph as a list of directed edges `(head, tail, weight)`
/// sorted by `(head, tail)`.
fn fuzzy_graph(knn: &Knn, k: usize) -> Vec<(usize, usize, f64)> {
    let params = smooth_knn(&knn.distances, k);
    let mut directed: HashMap<(usize, usize), f64> = HashMap::new();
    for (i, (nbrs, dists)) in knn.indices.iter().zip(&knn.distances).enumerate() {
        let (sigma, rho) = params[i];
        for (&j, &d) in nbrs.iter().zip(dists).skip(1) {
            if j == i {
                continue;
            }
            let w = if d - rho <= 0.0 {
                1.0
            } else {
                (-(d - rho) / sigma).exp()
            };
            directed.insert((i, j), w);
        }
    }
    let mut edges: Vec<(usize, usize, f64)> = Vec::with_capacity(directed.len() * 2);
    let mut keys: Vec<(usize, usize)> = directed.keys().copied().collect();
    keys.extend(directed.keys().map(|&(i, j)| (j, i)));
    keys.sort_unstable();
    keys.dedup();
    for (i, j) in keys {
        let a = directed.get(&(i, j)).copied().unwrap_or(0.0);
        let b = directed.get(&(j, i)).copied().unwrap_or(0.0);
        let w = a + b - a * b;
        if w > 0.0 {
            edges.push((i, j, w));
        }
    }
    edges
}

/// PCA coordinates scaled so the largest absolute coordinate is 10, plus a
/// little uniform jitter.
fn initial_layout(x: MatrixView<'_>, dim_out: usize, rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
    let n = x.rows();
    let r = dim_out.min(x.cols());
    let mut out = vec![0.0; n * dim_out];
    if n >= 2 {
        let model = fit_pca(x, r)?;
        let projected = model.transform(x);
        for i in 0..n {
            out[i * dim_out..i * dim_out + r].copy_from_slice(&projected[i * r..(i + 1) * r]);
        }
    }
    let max_abs = out.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if max_abs > 0.0 {
        out.iter_mut().for_each(|v| *v *= 10.0 / max_abs);
    }
    out.iter_mut()
        .for_each(|v| *v += rng.gen_range(-1e-4..1e-4));
    Ok(out)
}

fn clip(v: f64) -> f64 {
    if v.is_nan() {
        0.0
    } else {
        v.clamp(-4.0, 4.0)
    }
}

/// Embed rows of `x` into `params.dim_out` dimensions. Deterministic for a
/// given seed: neighbor search is exact and the optimizer is single-threaded.
pub fn umap_reduce(x: MatrixView<'_>, params: &UmapParams) -> Result<ReducedEmbedding> {
    params.validate()?;
    let n = x.rows();
    if n < 2 {
        return Err(Error::InvalidInput(format!(
            "UMAP needs at least 2 rows, got {n}"
        )));
    }
    if !x.is_finite() {
        return Err(Error::InvalidInput(
            "input contains non-finite values".into(),
        ));
    }
    let dim = params.dim_out;
    let k = params.n_neighbors.min(n);
    let (a, b) = fit_curve_params(params.spread, params.min_dist);
    debug!("umap: n={n} k={k} a={a:.4} b={b:.4}");

    let knn = exact_knn(x, k);
    let mut edges = fuzzy_graph(&knn, k);
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut emb = initial_layout(x, dim, &mut rng)?;

    let n_epochs = params.n_epochs as f64;
    let max_w = edges.iter().fold(0.0f64, |m, e| m.max(e.2));
    edges.retain(|e| e.2 >= max_w / n_epochs);
    edges.shuffle(&mut rng);

    let eps: Vec<f64> = edges.iter().map(|e| max_w / e.2).collect();
    let neg_rate = params.negative_sample_rate.max(1) as f64;
    let epns: Vec<f64> = eps.iter().map(|e| e / neg_rate).collect();
    let mut next_sample = eps.clone();
    let mut next_negative = epns.clone();
    let gamma = params.repulsion_strength;

    for epoch in 0..params.n_epochs {
        let e = epoch as f64;
        let alpha = params.learning_rate * (1.0 - e / n_epochs);
        for (idx, &(head, tail, _)) in edges.iter().enumerate() {
            if next_sample[idx] > e {
                continue;
            }
            let d2 = dist_sq(&emb, head, tail, dim);
            let coeff = if d2 > 0.0 {
                -2.0 * a * b * d2.powf(b - 1.0) / (a * d2.powf(b) + 1.0)
            } else {
                0.0
            };
            for d in 0..dim {
                let grad = clip(coeff * (emb[head * dim + d] - emb[tail * dim + d]));
                emb[head * dim + d] += grad * alpha;
                emb[tail * dim + d] -= grad * alpha;
            }
            next_sample[idx] += eps[idx];

            let n_neg = ((e - next_negative[idx]) / epns[idx]).max(0.0) as usize;
            for _ in 0..n_neg {
                let other = rng.gen_range(0..n);
                if other == head {
                    continue;
                }
                let d2 = dist_sq(&emb, head, other, dim);
                if d2 <= 0.0 {
                    continue;
                }
                let coeff = 2.0 * gamma * b / ((0.001 + d2) * (a * d2.powf(b) + 1.0));
                for d in 0..dim {
                    let grad = clip(coeff * (emb[head * dim + d] - emb[other * dim + d]));
                    emb[head * dim + d] += grad * alpha;
                }
            }
            next_negative[idx] += n_neg as f64 * epns[idx];
        }
    }

    if emb.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput(
            "UMAP produced non-finite coordinates".into(),
        ));
    }
    Ok(ReducedEmbedding {
        n_rows: n,
        dim_out: dim,
        values: emb,
        seed: params.seed,
    })
}

fn dist_sq(emb: &[f64], i: usize, j: usize, dim: usize) -> f64 {
    (0..dim)
        .map(|d| (emb[i * dim + d] - emb[j * dim + d]).powi(2))
        .sum()
}
