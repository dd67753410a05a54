//! Dimensionality reduction: PCA (deterministic, linear) and UMAP.

mod pca;
mod umap;

use std::path::Path;

pub use pca::{fit_pca, pca_reduce, PcaModel};
pub use umap::{fit_curve_params, umap_reduce, UmapParams};

use crate::matrix::MatrixView;
use crate::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct ReducedEmbedding {
    pub n_rows: usize,
    pub dim_out: usize,
    /// Row-major.
    pub values: Vec<f64>,
    /// RNG seed used (0 for PCA, which draws no random numbers).
    pub seed: u64,
}

impl ReducedEmbedding {
    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.dim_out..(i + 1) * self.dim_out]
    }

    pub fn view(&self) -> MatrixView<'_> {
        MatrixView::new(self.n_rows, self.dim_out, &self.values).expect("consistent shape")
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        crate::matrix::save_matrix(path, self.view())
    }

    /// The seed is not persisted; loaded matrices report seed 0.
    pub fn load(path: &Path) -> Result<Self> {
        let (n_rows, dim_out, values) = crate::matrix::load_matrix(path)?;
        Ok(Self {
            n_rows,
            dim_out,
            values,
            seed: 0,
        })
    }
}
