//! Markov Clustering: alternating expansion and inflation of the
//! column-stochastic transition matrix until the flow stabilizes.
//!
//! A self-loop of weight 1 is added to every node before normalization.
//! Expansion raises the matrix to the `mcl_expansion`-th power; inflation
//! raises entries elementwise to `mcl_inflation` and renormalizes columns.
//! Iteration stops when the largest entry change drops below `mcl_epsilon`
//! or after `mcl_max_iterations` rounds. Clusters are read from attractor
//! rows' supports; a node covered by several attractors joins the one with
//! the lowest id. Connected components are processed independently, which
//! leaves the result unchanged (the matrix is block-diagonal) but avoids
//! fill-in across components.

use crate::clusterers::ClustererSpec;
use crate::graph::{Graph, NodeId};

/// Column-major sparse matrix; rows within a column stay sorted.
#[derive(Debug, Clone)]
struct Columns {
    cols: Vec<Vec<(usize, f64)>>,
}

impl Columns {
    fn transition(graph: &Graph, members: &[NodeId]) -> Self {
        let local: std::collections::HashMap<NodeId, usize> = members
            .iter()
            .enumerate()
            .map(|(i, &v)| (v, i))
            .collect();
        let mut cols = Vec::with_capacity(members.len());
        for (j, &v) in members.iter().enumerate() {
            let mut col: Vec<(usize, f64)> = graph
                .neighbors(v)
                .map(|(w, weight)| (local[&w], weight))
                .collect();
            col.push((j, 1.0)); // self-loop
            col.sort_unstable_by_key(|&(i, _)| i);
            cols.push(col);
        }
        let mut matrix = Self { cols };
        matrix.normalize();
        matrix
    }

    fn normalize(&mut self) {
        for col in &mut self.cols {
            let sum: f64 = col.iter().map(|&(_, v)| v).sum();
            if sum > 0.0 {
                for (_, v) in col.iter_mut() {
                    *v /= sum;
                }
            }
        }
    }

    fn multiply(&self, other: &Columns) -> Columns {
        let n = self.cols.len();
        let mut cols = vec![Vec::new(); n];
        let mut dense = vec![0.0f64; n];
        let mut seen = vec![false; n];
        let mut touched: Vec<usize> = Vec::new();
        for (j, col) in other.cols.iter().enumerate() {
            for &(k, vk) in col {
                for &(i, vi) in &self.cols[k] {
                    if !seen[i] {
                        seen[i] = true;
                        touched.push(i);
                    }
                    dense[i] += vi * vk;
                }
            }
            touched.sort_unstable();
            let mut result = Vec::with_capacity(touched.len());
            for &i in &touched {
                // Entries that underflowed to zero carry no flow.
                if dense[i] != 0.0 {
                    result.push((i, dense[i]));
                }
                dense[i] = 0.0;
                seen[i] = false;
            }
            touched.clear();
            cols[j] = result;
        }
        Columns { cols }
    }

    fn expand(&self, power: u32) -> Columns {
        let mut result = self.multiply(self);
        for _ in 2..power {
            result = self.multiply(&result);
        }
        result
    }

    fn inflate(&mut self, inflation: f64) {
        for col in &mut self.cols {
            for (_, v) in col.iter_mut() {
                *v = v.powf(inflation);
            }
        }
        self.normalize();
    }

    /// Largest absolute entry difference between two matrices.
    fn max_change(&self, other: &Columns) -> f64 {
        let mut change = 0.0f64;
        for (a, b) in self.cols.iter().zip(&other.cols) {
            let (mut i, mut j) = (0, 0);
            while i < a.len() || j < b.len() {
                let delta = match (a.get(i), b.get(j)) {
                    (Some(&(ra, va)), Some(&(rb, vb))) if ra == rb => {
                        i += 1;
                        j += 1;
                        (va - vb).abs()
                    }
                    (Some(&(ra, va)), Some(&(rb, _))) if ra < rb => {
                        i += 1;
                        va.abs()
                    }
                    (Some(_), Some(&(_, vb))) => {
                        j += 1;
                        vb.abs()
                    }
                    (Some(&(_, va)), None) => {
                        i += 1;
                        va.abs()
                    }
                    (None, Some(&(_, vb))) => {
                        j += 1;
                        vb.abs()
                    }
                    (None, None) => break,
                };
                change = change.max(delta);
            }
        }
        change
    }

    fn entry(&self, row: usize, col: usize) -> f64 {
        self.cols[col]
            .binary_search_by_key(&row, |&(i, _)| i)
            .map(|k| self.cols[col][k].1)
            .unwrap_or(0.0)
    }

    /// Rows as sorted support lists with entries above `threshold`.
    fn row_supports(&self, threshold: f64) -> Vec<Vec<usize>> {
        let n = self.cols.len();
        let mut rows = vec![Vec::new(); n];
        for (j, col) in self.cols.iter().enumerate() {
            for &(i, v) in col {
                if v > threshold {
                    rows[i].push(j);
                }
            }
        }
        rows
    }
}

pub(crate) fn markov_clustering_ids(graph: &Graph, spec: &ClustererSpec) -> Vec<Vec<NodeId>> {
    let mut clusters = Vec::new();
    for members in graph.connected_components() {
        for local in cluster_component(graph, &members, spec) {
            clusters.push(local.into_iter().map(|i| members[i]).collect());
        }
    }
    clusters
}

fn cluster_component(graph: &Graph, members: &[NodeId], spec: &ClustererSpec) -> Vec<Vec<usize>> {
    let n = members.len();
    if n == 1 {
        return vec![vec![0]];
    }
    let mut matrix = Columns::transition(graph, members);
    for _ in 0..spec.mcl_max_iterations {
        let mut next = matrix.expand(spec.mcl_expansion);
        next.inflate(spec.mcl_inflation);
        let change = next.max_change(&matrix);
        matrix = next;
        if change < spec.mcl_epsilon {
            break;
        }
    }

    let threshold = spec.mcl_epsilon;
    let supports = matrix.row_supports(threshold);
    let attractors: Vec<usize> = (0..n)
        .filter(|&i| matrix.entry(i, i) > threshold)
        .collect();

    let mut owner = vec![usize::MAX; n];
    for &a in &attractors {
        for &j in &supports[a] {
            if owner[j] == usize::MAX {
                owner[j] = a;
            }
        }
    }
    // A node whose column mass sits entirely on non-attractor rows can only
    // appear before convergence; fall back to its dominant row, then to a
    // singleton.
    for j in 0..n {
        if owner[j] != usize::MAX {
            continue;
        }
        let dominant = matrix.cols[j]
            .iter()
            .filter(|&&(i, _)| owner[i] != usize::MAX)
            .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap().then(b.0.cmp(&a.0)))
            .map(|&(i, _)| owner[i]);
        owner[j] = dominant.unwrap_or(j);
    }

    let mut position: std::collections::BTreeMap<usize, usize> = std::collections::BTreeMap::new();
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for (j, &attractor) in owner.iter().enumerate() {
        let slot = *position.entry(attractor).or_insert_with(|| {
            clusters.push(Vec::new());
            clusters.len() - 1
        });
        clusters[slot].push(j);
    }
    clusters
}
