use nalgebra::{DMatrix, SymmetricEigen};

use super::ReducedEmbedding;
use crate::matrix::MatrixView;
use crate::{Error, Result};

/// Principal axes of a centered data matrix.
#[derive(Debug, Clone)]
pub struct PcaModel {
    pub mean: Vec<f64>,
    /// `r` unit-length components, each of length `dim`. Components past the
    /// data rank are all-zero.
    pub components: Vec<Vec<f64>>,
    /// Eigenvalues of the covariance matrix, descending.
    pub explained_variance: Vec<f64>,
}

impl PcaModel {
    pub fn transform(&self, x: MatrixView<'_>) -> Vec<f64> {
        let r = self.components.len();
        let mut out = vec![0.0; x.rows() * r];
        for i in 0..x.rows() {
            let row = x.row(i);
            for (c, comp) in self.components.iter().enumerate() {
                out[i * r + c] = row
                    .iter()
                    .zip(&self.mean)
                    .zip(comp)
                    .map(|((v, m), w)| (v - m) * w)
                    .sum();
            }
        }
        out
    }

    /// Map reduced coordinates back into the input space.
    pub fn inverse_transform(&self, reduced: &[f64]) -> Vec<f64> {
        let r = self.components.len();
        let dim = self.mean.len();
        let n = reduced.len().checked_div(r).unwrap_or(0);
        let mut out = Vec::with_capacity(n * dim);
        for i in 0..n {
            for d in 0..dim {
                let v: f64 = (0..r)
                    .map(|c| reduced[i * r + c] * self.components[c][d])
                    .sum();
                out.push(self.mean[d] + v);
            }
        }
        out
    }
}

/// Fit the top-`r` principal components.
///
/// Components are ordered by descending variance; each is flipped so its
/// largest-magnitude coordinate is positive. When `r` exceeds the numerical
/// rank the surplus components are zero (a warning is logged).
pub fn fit_pca(x: MatrixView<'_>, r: usize) -> Result<PcaModel> {
    let (n, dim) = (x.rows(), x.cols());
    if r == 0 || r > n.min(dim) {
        return Err(Error::InvalidInput(format!(
            "PCA target dimension {r} must be in 1..={}",
            n.min(dim)
        )));
    }
    if !x.is_finite() {
        return Err(Error::InvalidInput("PCA input contains NaN or Inf".into()));
    }
    let mut mean = vec![0.0; dim];
    for i in 0..n {
        for (m, v) in mean.iter_mut().zip(x.row(i)) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n as f64);

    let centered = DMatrix::from_fn(n, dim, |i, j| x.row(i)[j] - mean[j]);
    let denom = (n.max(2) - 1) as f64;
    let cov = (centered.transpose() * &centered) / denom;
    let eig = SymmetricEigen::new(cov);

    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    let max_eig = eig.eigenvalues.iter().cloned().fold(0.0f64, f64::max);
    let tol = max_eig * 1e-12 * dim as f64;

    let mut components = Vec::with_capacity(r);
    let mut explained = Vec::with_capacity(r);
    let mut deficient = 0;
    for &idx in order.iter().take(r) {
        let value = eig.eigenvalues[idx];
        if value <= tol || max_eig <= 0.0 {
            deficient += 1;
            components.push(vec![0.0; dim]);
            explained.push(0.0);
            continue;
        }
        let mut comp: Vec<f64> = eig.eigenvectors.column(idx).iter().cloned().collect();
        let pivot = comp.iter().enumerate().fold((0, 0.0f64), |best, (i, v)| {
            if v.abs() > best.1.abs() {
                (i, *v)
            } else {
                best
            }
        });
        if pivot.1 < 0.0 {
            comp.iter_mut().for_each(|v| *v = -*v);
        }
        components.push(comp);
        explained.push(value);
    }
    if deficient > 0 {
        log::warn!(
            "PCA: requested {r} components but data rank supports {}; zero-filling",
            r - deficient
        );
    }
    Ok(PcaModel {
        mean,
        components,
        explained_variance: explained,
    })
}

/// Project onto the top-`r` principal components.
pub fn pca_reduce(x: MatrixView<'_>, r: usize) -> Result<ReducedEmbedding> {
    let model = fit_pca(x, r)?;
    Ok(ReducedEmbedding {
        n_rows: x.rows(),
        dim_out: r,
        values: model.transform(x),
        seed: 0,
    })
}
