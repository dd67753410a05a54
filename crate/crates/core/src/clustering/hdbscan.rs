use rayon::prelude::*;

use super::{ClusterAssignment, HdbscanParams};
use crate::matrix::MatrixView;
use crate::util::euclidean;
use crate::{Error, Result};

const MIN_DISTANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MstEdge {
    pub a: usize,
    pub b: usize,
    pub weight: f64,
}

/// Row of the condensed tree. Nodes below `n_points` are points; cluster
/// nodes are numbered from `n_points`, the root being `n_points` itself.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CondensedEdge {
    pub parent: usize,
    pub child: usize,
    pub lambda: f64,
    pub child_size: usize,
}

/// Everything HDBSCAN computes on the way to a flat clustering.
#[derive(Debug, Clone)]
pub struct HdbscanModel {
    pub core_distances: Vec<f64>,
    pub mst: Vec<MstEdge>,
    pub condensed: Vec<CondensedEdge>,
    /// Stability of each condensed cluster, indexed by `node - n_points`.
    pub stability: Vec<f64>,
    /// Condensed cluster nodes chosen by excess-of-mass selection.
    pub selected: Vec<usize>,
    pub assignment: ClusterAssignment,
}

pub fn hdbscan_fit(x: MatrixView<'_>, params: &HdbscanParams) -> Result<ClusterAssignment> {
    Ok(hdbscan_fit_detailed(x, params)?.assignment)
}

pub fn hdbscan_fit_detailed(x: MatrixView<'_>, params: &HdbscanParams) -> Result<HdbscanModel> {
    params.validate()?;
    let n = x.rows();
    let mcs = params.min_cluster_size;
    if n <= mcs {
        return Err(Error::CorpusTooSmall {
            n_rows: n,
            min_cluster_size: mcs,
        });
    }
    if !x.is_finite() {
        return Err(Error::InvalidInput(
            "input contains non-finite values".into(),
        ));
    }

    let core = core_distances(x, params.min_samples());
    let mst = prim_mst(x, &core);
    let dendrogram = single_linkage(n, &mst);
    let condensed = condense(n, &dendrogram, mcs);
    let n_clusters = condensed
        .iter()
        .map(|e| e.parent)
        .max()
        .map_or(1, |m| m - n + 1);
    let stability = stabilities(n, n_clusters, &condensed);
    let selected = select_eom(
        n,
        n_clusters,
        &condensed,
        &stability,
        params.allow_single_cluster,
    );
    let assignment = label_points(n, &condensed, &selected);
    Ok(HdbscanModel {
        core_distances: core,
        mst,
        condensed,
        stability,
        selected,
        assignment,
    })
}

/// Distance to the `min_samples`-th nearest point, counting the point itself.
fn core_distances(x: MatrixView<'_>, min_samples: usize) -> Vec<f64> {
    (0..x.rows())
        .into_par_iter()
        .map(|i| {
            let mut d: Vec<f64> = (0..x.rows())
                .map(|j| euclidean(x.row(i), x.row(j)))
                .collect();
            let k = (min_samples - 1).min(d.len() - 1);
            let (_, kth, _) = d.select_nth_unstable_by(k, |a, b| a.total_cmp(b));
            *kth
        })
        .collect()
}

fn mutual_reachability(x: MatrixView<'_>, core: &[f64], i: usize, j: usize) -> f64 {
    euclidean(x.row(i), x.row(j)).max(core[i]).max(core[j])
}

/// Prim's algorithm on the implicit complete graph, O(n^2) time and O(n)
/// memory. Ties pick the lowest vertex index.
fn prim_mst(x: MatrixView<'_>, core: &[f64]) -> Vec<MstEdge> {
    let n = x.rows();
    let mut in_tree = vec![false; n];
    let mut best = vec![f64::INFINITY; n];
    let mut from = vec![0usize; n];
    let mut edges = Vec::with_capacity(n.saturating_sub(1));
    let mut current = 0;
    in_tree[0] = true;
    for _ in 1..n {
        let row: Vec<(usize, f64)> = (0..n)
            .into_par_iter()
            .filter(|&j| !in_tree[j])
            .map(|j| (j, mutual_reachability(x, core, current, j)))
            .collect();
        for (j, d) in row {
            if d < best[j] {
                best[j] = d;
                from[j] = current;
            }
        }
        let mut next = usize::MAX;
        for j in 0..n {
            if !in_tree[j] && (next == usize::MAX || best[j] < best[next]) {
                next = j;
            }
        }
        in_tree[next] = true;
        edges.push(MstEdge {
            a: from[next],
            b: next,
            weight: best[next],
        });
        current = next;
    }
    edges
}

struct Merge {
    left: usize,
    right: usize,
    distance: f64,
    size: usize,
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }
}

/// Dendrogram nodes `n..2n-1`; merge `m` creates node `n + m`.
fn single_linkage(n: usize, mst: &[MstEdge]) -> Vec<Merge> {
    let mut edges = mst.to_vec();
    edges.sort_by(|p, q| {
        p.weight
            .total_cmp(&q.weight)
            .then(p.a.min(p.b).cmp(&q.a.min(q.b)))
            .then(p.a.max(p.b).cmp(&q.a.max(q.b)))
    });
    let mut uf = UnionFind::new(2 * n - 1);
    let mut size = vec![1usize; 2 * n - 1];
    let mut merges = Vec::with_capacity(n - 1);
    for (m, e) in edges.iter().enumerate() {
        let (ra, rb) = (uf.find(e.a), uf.find(e.b));
        let node = n + m;
        uf.parent[ra] = node;
        uf.parent[rb] = node;
        size[node] = size[ra] + size[rb];
        merges.push(Merge {
            left: ra,
            right: rb,
            distance: e.weight,
            size: size[node],
        });
    }
    merges
}

fn lambda_of(distance: f64) -> f64 {
    1.0 / distance.max(MIN_DISTANCE)
}

fn condense(n: usize, merges: &[Merge], mcs: usize) -> Vec<CondensedEdge> {
    let node_size = |node: usize| if node < n { 1 } else { merges[node - n].size };
    let leaves_under = |node: usize| -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![node];
        while let Some(v) = stack.pop() {
            if v < n {
                out.push(v);
            } else {
                stack.push(merges[v - n].right);
                stack.push(merges[v - n].left);
            }
        }
        out
    };

    let root = 2 * n - 2;
    let mut out = Vec::new();
    let mut next_label = n + 1;
    // (dendrogram node, condensed cluster it belongs to)
    let mut stack = vec![(root, n)];
    while let Some((node, cluster)) = stack.pop() {
        if node < n {
            continue;
        }
        let merge = &merges[node - n];
        let lambda = lambda_of(merge.distance);
        let (l, r) = (merge.left, merge.right);
        let (ls, rs) = (node_size(l), node_size(r));
        match (ls >= mcs, rs >= mcs) {
            (true, true) => {
                for child in [l, r] {
                    let label = next_label;
                    next_label += 1;
                    out.push(CondensedEdge {
                        parent: cluster,
                        child: label,
                        lambda,
                        child_size: node_size(child),
                    });
                    stack.push((child, label));
                }
            }
            (false, false) => {
                for child in [l, r] {
                    for p in leaves_under(child) {
                        out.push(CondensedEdge {
                            parent: cluster,
                            child: p,
                            lambda,
                            child_size: 1,
                        });
                    }
                }
            }
            (big_left, _) => {
                let (big, small) = if big_left { (l, r) } else { (r, l) };
                for p in leaves_under(small) {
                    out.push(CondensedEdge {
                        parent: cluster,
                        child: p,
                        lambda,
                        child_size: 1,
                    });
                }
                stack.push((big, cluster));
            }
        }
    }
    out
}

fn stabilities(n: usize, n_clusters: usize, condensed: &[CondensedEdge]) -> Vec<f64> {
    let mut birth = vec![0.0; n_clusters];
    for e in condensed.iter().filter(|e| e.child >= n) {
        birth[e.child - n] = e.lambda;
    }
    let mut stability = vec![0.0; n_clusters];
    for e in condensed {
        stability[e.parent - n] += (e.lambda - birth[e.parent - n]) * e.child_size as f64;
    }
    stability
}

fn child_clusters(n: usize, n_clusters: usize, condensed: &[CondensedEdge]) -> Vec<Vec<usize>> {
    let mut children = vec![Vec::new(); n_clusters];
    for e in condensed.iter().filter(|e| e.child >= n) {
        children[e.parent - n].push(e.child);
    }
    children
}

/// Excess-of-mass selection. The root is a candidate only when
/// `allow_single_cluster` is set.
fn select_eom(
    n: usize,
    n_clusters: usize,
    condensed: &[CondensedEdge],
    stability: &[f64],
    allow_single_cluster: bool,
) -> Vec<usize> {
    let children = child_clusters(n, n_clusters, condensed);
    let mut best = stability.to_vec();
    let mut is_selected = vec![true; n_clusters];
    is_selected[0] = allow_single_cluster;
    let lowest = if allow_single_cluster { 0 } else { 1 };
    // children always carry larger labels than their parent
    for c in (lowest..n_clusters).rev() {
        let subtree: f64 = children[c].iter().map(|&ch| best[ch - n]).sum();
        if subtree > stability[c] {
            is_selected[c] = false;
            best[c] = subtree;
        } else {
            let mut stack = children[c].clone();
            while let Some(d) = stack.pop() {
                is_selected[d - n] = false;
                stack.extend(children[d - n].iter().copied());
            }
        }
    }
    (lowest..n_clusters)
        .filter(|&c| is_selected[c])
        .map(|c| c + n)
        .collect()
}

fn label_points(n: usize, condensed: &[CondensedEdge], selected: &[usize]) -> ClusterAssignment {
    let n_nodes = condensed
        .iter()
        .map(|e| e.child.max(e.parent))
        .max()
        .unwrap_or(n)
        + 1;
    let mut parent = vec![usize::MAX; n_nodes];
    let mut point_lambda = vec![0.0; n];
    for e in condensed {
        parent[e.child] = e.parent;
        if e.child < n {
            point_lambda[e.child] = e.lambda;
        }
    }
    let mut is_selected = vec![false; n_nodes];
    for &c in selected {
        is_selected[c] = true;
    }

    let mut raw: Vec<Option<usize>> = vec![None; n];
    for (p, slot) in raw.iter_mut().enumerate() {
        let mut node = parent[p];
        while node != usize::MAX {
            if is_selected[node] {
                *slot = Some(node);
                break;
            }
            node = parent[node];
        }
    }

    let mut max_lambda = vec![0.0f64; n_nodes];
    for (p, c) in raw.iter().enumerate() {
        if let Some(c) = c {
            max_lambda[*c] = max_lambda[*c].max(point_lambda[p]);
        }
    }

    // renumber: size descending, then lowest member index
    let mut order: Vec<(usize, usize, usize)> = selected
        .iter()
        .map(|&c| {
            let members = raw.iter().enumerate().filter(|(_, r)| **r == Some(c));
            let (count, first) = members.fold((0, usize::MAX), |(k, f), (i, _)| (k + 1, f.min(i)));
            (c, count, first)
        })
        .filter(|&(_, count, _)| count > 0)
        .collect();
    order.sort_by(|p, q| q.1.cmp(&p.1).then(p.2.cmp(&q.2)));
    let mut new_id = vec![-1i64; n_nodes];
    for (id, &(c, _, _)) in order.iter().enumerate() {
        new_id[c] = id as i64;
    }

    let mut labels = vec![-1i64; n];
    let mut strength = vec![0.0; n];
    for p in 0..n {
        if let Some(c) = raw[p] {
            labels[p] = new_id[c];
            strength[p] = if max_lambda[c] > 0.0 {
                point_lambda[p].min(max_lambda[c]) / max_lambda[c]
            } else {
                1.0
            };
        }
    }
    ClusterAssignment {
        labels,
        k: order.len(),
        membership_strength: strength,
    }
}
