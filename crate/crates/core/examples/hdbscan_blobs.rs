//! Cluster 2-D blobs plus uniform background noise with HDBSCAN.

use apitopics::clustering::{hdbscan_fit_detailed, HdbscanParams};
use apitopics::datasets::{gaussian_blobs, uniform_square};
use apitopics::matrix::MatrixView;

fn main() -> anyhow::Result<()> {
    let mut points = gaussian_blobs(4, 60, 2, 0.04, 1.0, 9).points;
    let max = points.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    // scatter 40 points over the same area
    points.extend(
        uniform_square(40, 9)
            .into_iter()
            .map(|p| p.iter().map(|v| (v * 2.0 - 1.0) * max).collect()),
    );

    let flat: Vec<f64> = points.concat();
    let view = MatrixView::new(points.len(), 2, &flat)?;
    let model = hdbscan_fit_detailed(view, &HdbscanParams::new(15))?;
    let a = &model.assignment;

    println!(
        "{} clusters, {} noise points of {}",
        a.k,
        a.n_noise(),
        points.len()
    );
    for (c, size) in a.sizes().iter().enumerate() {
        let strength: f64 = a
            .members(c)
            .iter()
            .map(|&i| a.membership_strength[i])
            .sum::<f64>()
            / *size as f64;
        println!("cluster {c}: {size} points, mean membership {strength:.2}");
    }
    println!(
        "MST of {} edges, condensed tree of {} edges",
        model.mst.len(),
        model.condensed.len()
    );
    Ok(())
}
