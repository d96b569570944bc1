//! Chinese Whispers label propagation.
//!
//! Every node starts with its own label; each iteration visits all nodes in
//! a freshly drawn seed-determined permutation and assigns each node the
//! label with the highest summed neighbor influence. Updates are applied in
//! place, so changes within an iteration are visible to later visits. The
//! loop stops at a label fixpoint or after `cw_max_iterations` sweeps.

use std::collections::BTreeMap;

use crate::clusterers::{ClustererSpec, CwWeighting};
use crate::graph::{Graph, NodeId};
use crate::rng::SplitMix64;

pub(crate) fn chinese_whispers_ids(graph: &Graph, spec: &ClustererSpec) -> Vec<Vec<NodeId>> {
    let (labels, _) = run(graph, spec);
    group_by_label(&labels)
}

/// Runs the propagation and also reports the number of distinct labels after
/// every iteration, which the tests use to check monotonicity.
pub(crate) fn run(graph: &Graph, spec: &ClustererSpec) -> (Vec<usize>, Vec<usize>) {
    let n = graph.node_count();
    let mut labels: Vec<usize> = (0..n).collect();
    let mut history = Vec::new();
    if n == 0 {
        return (labels, history);
    }

    let mut rng = SplitMix64::new(spec.seed);
    let mut order: Vec<NodeId> = (0..n).collect();
    let mut scores: BTreeMap<usize, f64> = BTreeMap::new();

    for _ in 0..spec.cw_max_iterations {
        rng.shuffle(&mut order);
        let mut changed = false;
        for &u in &order {
            if graph.degree(u) == 0 {
                continue;
            }
            scores.clear();
            for (v, w) in graph.neighbors(u) {
                let influence = match spec.cw_weighting {
                    CwWeighting::Top => w,
                    CwWeighting::Lin => w / graph.degree(v) as f64,
                    CwWeighting::Log => w / (1.0 + graph.degree(v) as f64).ln(),
                };
                *scores.entry(labels[v]).or_insert(0.0) += influence;
            }
            // Ascending label order plus strict comparison resolves ties to
            // the lowest label id, independent of the seed.
            let mut best_label = usize::MAX;
            let mut best_score = f64::NEG_INFINITY;
            for (&label, &score) in &scores {
                if score > best_score {
                    best_score = score;
                    best_label = label;
                }
            }
            if labels[u] != best_label {
                labels[u] = best_label;
                changed = true;
            }
        }
        history.push(distinct_count(&labels));
        if !changed {
            break;
        }
    }
    (labels, history)
}

fn distinct_count(labels: &[usize]) -> usize {
    let mut sorted = labels.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    sorted.len()
}

/// Groups nodes by final label; clusters come out ordered by their lowest
/// member id.
fn group_by_label(labels: &[usize]) -> Vec<Vec<NodeId>> {
    let mut position: BTreeMap<usize, usize> = BTreeMap::new();
    let mut clusters: Vec<Vec<NodeId>> = Vec::new();
    for (node, &label) in labels.iter().enumerate() {
        let slot = *position.entry(label).or_insert_with(|| {
            clusters.push(Vec::new());
            clusters.len() - 1
        });
        clusters[slot].push(node);
    }
    clusters
}
