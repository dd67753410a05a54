//! Density-based clustering of (reduced) embeddings with HDBSCAN.

mod hdbscan;

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

pub use hdbscan::{hdbscan_fit, hdbscan_fit_detailed, CondensedEdge, HdbscanModel, MstEdge};

use crate::util::write_atomic;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HdbscanParams {
    pub min_cluster_size: usize,
    /// Defaults to `min_cluster_size` when absent.
    pub min_samples: Option<usize>,
    /// Let the root of the condensed tree be chosen as the single cluster.
    pub allow_single_cluster: bool,
}

impl Default for HdbscanParams {
    fn default() -> Self {
        Self {
            min_cluster_size: 10,
            min_samples: None,
            allow_single_cluster: false,
        }
    }
}

impl HdbscanParams {
    pub fn new(min_cluster_size: usize) -> Self {
        Self {
            min_cluster_size,
            min_samples: None,
            allow_single_cluster: false,
        }
    }

    pub fn min_samples(&self) -> usize {
        self.min_samples.unwrap_or(self.min_cluster_size)
    }

    pub fn validate(&self) -> Result<()> {
        if self.min_cluster_size == 0 {
            return Err(Error::InvalidInput(
                "min_cluster_size must be positive".into(),
            ));
        }
        let ms = self.min_samples();
        if ms == 0 || ms > self.min_cluster_size {
            return Err(Error::InvalidInput(format!(
                "min_samples must be in 1..={}, got {ms}",
                self.min_cluster_size
            )));
        }
        Ok(())
    }
}

/// Flat clustering: `labels[i]` is `-1` for noise, otherwise a cluster id in
/// `0..k`, with id 0 the largest cluster.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterAssignment {
    pub labels: Vec<i64>,
    pub k: usize,
    pub membership_strength: Vec<f64>,
}

impl ClusterAssignment {
    pub fn n_noise(&self) -> usize {
        self.labels.iter().filter(|&&l| l < 0).count()
    }

    /// Document indices of cluster `c`, ascending.
    pub fn members(&self, c: usize) -> Vec<usize> {
        self.labels
            .iter()
            .enumerate()
            .filter(|(_, &l)| l == c as i64)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &l in &self.labels {
            if l >= 0 {
                sizes[l as usize] += 1;
            }
        }
        sizes
    }

    /// One `doc_id TAB label TAB strength` line per document.
    pub fn write_tsv<W: Write + ?Sized>(&self, out: &mut W) -> Result<()> {
        for (i, (l, s)) in self
            .labels
            .iter()
            .zip(&self.membership_strength)
            .enumerate()
        {
            writeln!(out, "{i}\t{l}\t{s}")?;
        }
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_atomic(path, |w| self.write_tsv(w))
    }

    pub fn read_tsv<R: BufRead>(input: R) -> Result<Self> {
        let mut labels = Vec::new();
        let mut strength = Vec::new();
        for (idx, line) in input.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let bad = |reason: String| Error::Parse {
                what: "assignment",
                line: idx + 1,
                reason,
            };
            let fields: Vec<&str> = line.split('\t').collect();
            let [id, label, s] = fields[..] else {
                return Err(bad(format!("expected 3 fields, got {}", fields.len())));
            };
            let id: usize = id.parse().map_err(|e| bad(format!("doc_id: {e}")))?;
            if id != labels.len() {
                return Err(bad(format!("expected doc_id {}, got {id}", labels.len())));
            }
            labels.push(
                label
                    .parse::<i64>()
                    .map_err(|e| bad(format!("label: {e}")))?,
            );
            strength.push(
                s.parse::<f64>()
                    .map_err(|e| bad(format!("strength: {e}")))?,
            );
        }
        let k = labels
            .iter()
            .copied()
            .max()
            .map_or(0, |m| (m + 1).max(0) as usize);
        Ok(Self {
            labels,
            k,
            membership_strength: strength,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::read_tsv(BufReader::new(File::open(path)?))
    }
}
