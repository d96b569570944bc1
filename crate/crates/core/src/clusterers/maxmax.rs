//! MaxMax soft clustering by maximal mutual affinity.
//!
//! The undirected input is turned into a directed graph that keeps, for each
//! node, the arcs to its maximal-weight neighbors (on ties every maximal arc
//! is kept). All nodes start as roots; scanning nodes in ascending id order,
//! each surviving root forms a cluster with the nodes its arcs point to, and
//! those child nodes are demoted to non-roots. A node can be the child of
//! several roots, so clusters may overlap.

use crate::clusterers::ClustererSpec;
use crate::graph::{Graph, NodeId};

pub(crate) fn maxmax_ids(graph: &Graph, _spec: &ClustererSpec) -> Vec<Vec<NodeId>> {
    let n = graph.node_count();
    let mut arcs: Vec<Vec<NodeId>> = Vec::with_capacity(n);
    for u in 0..n {
        let max_weight = graph
            .neighbors(u)
            .map(|(_, w)| w)
            .fold(f64::NEG_INFINITY, f64::max);
        arcs.push(
            graph
                .neighbors(u)
                .filter(|&(_, w)| w == max_weight)
                .map(|(v, _)| v)
                .collect(),
        );
    }

    let mut root = vec![true; n];
    let mut clusters = Vec::new();
    for u in 0..n {
        if !root[u] {
            continue;
        }
        let mut members = Vec::with_capacity(arcs[u].len() + 1);
        members.push(u);
        for &v in &arcs[u] {
            root[v] = false;
            members.push(v);
        }
        members.sort_unstable();
        clusters.push(members);
    }
    clusters
}
