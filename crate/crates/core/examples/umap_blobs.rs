//! Reduce three Gaussian blobs in 50 dimensions to 2 with UMAP and with PCA.

use apitopics::datasets::gaussian_blobs;
use apitopics::matrix::MatrixView;
use apitopics::reduction::{pca_reduce, umap_reduce, ReducedEmbedding, UmapParams};

fn centroids(r: &ReducedEmbedding, labels: &[usize]) -> Vec<Vec<f64>> {
    let k = labels.iter().max().unwrap() + 1;
    let mut sums = vec![vec![0.0; r.dim_out]; k];
    let mut counts = vec![0.0; k];
    for (i, &l) in labels.iter().enumerate() {
        for (s, v) in sums[l].iter_mut().zip(r.row(i)) {
            *s += v;
        }
        counts[l] += 1.0;
    }
    sums.into_iter()
        .zip(counts)
        .map(|(s, c)| s.into_iter().map(|v| v / c).collect())
        .collect()
}

fn main() -> anyhow::Result<()> {
    let blobs = gaussian_blobs(3, 100, 50, 1.0, 10.0, 3);
    let flat = blobs.flat();
    let view = MatrixView::new(blobs.points.len(), blobs.dim(), &flat)?;

    let params = UmapParams {
        dim_out: 2,
        seed: 7,
        ..UmapParams::default()
    };
    let umap = umap_reduce(view, &params)?;
    let pca = pca_reduce(view, 2)?;

    for (name, r) in [("umap", &umap), ("pca", &pca)] {
        println!("{name}:");
        for (blob, c) in centroids(r, &blobs.labels).iter().enumerate() {
            println!("  blob {blob} centred at ({:8.3}, {:8.3})", c[0], c[1]);
        }
    }
    Ok(())
}
