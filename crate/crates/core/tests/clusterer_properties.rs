//! Property suites and independent oracles for the hard clusterers.

mod common;

use std::collections::BTreeSet;

use common::{component_of, random_graph_for_seed};
use watset::clusterers::{
    chinese_whispers, cluster, markov_clustering, ClustererSpec, CwWeighting,
};
use watset::clustering::Clustering;
use watset::graph::Graph;

const GRAPHS: u64 = 250;

fn is_partition(clustering: &Clustering, graph: &Graph) -> bool {
    let mut seen = BTreeSet::new();
    for members in clustering.clusters() {
        for member in members {
            if !seen.insert(member.as_str()) {
                return false;
            }
        }
    }
    seen.len() == graph.node_count() && graph.labels().all(|l| seen.contains(l))
}

fn covers(clustering: &Clustering, graph: &Graph) -> bool {
    let vocabulary = clustering.vocabulary();
    graph.labels().all(|l| vocabulary.contains(l))
}

fn specs(seed: u64) -> Vec<ClustererSpec> {
    vec![
        ClustererSpec::chinese_whispers(CwWeighting::Top).with_seed(seed),
        ClustererSpec::chinese_whispers(CwWeighting::Lin).with_seed(seed),
        ClustererSpec::chinese_whispers(CwWeighting::Log).with_seed(seed),
        ClustererSpec::markov_clustering().with_seed(seed),
        ClustererSpec::maxmax().with_seed(seed),
    ]
}

#[test]
fn hard_clusterers_produce_exact_partitions() {
    for seed in 0..GRAPHS {
        let graph = random_graph_for_seed(seed, 40);
        for spec in specs(seed).into_iter().filter(|s| s.is_hard()) {
            let clustering = cluster(&graph, &spec);
            assert!(
                is_partition(&clustering, &graph),
                "seed {seed} algorithm {:?}",
                spec.algorithm
            );
        }
    }
}

#[test]
fn no_cluster_spans_connected_components() {
    for seed in 0..GRAPHS {
        let graph = random_graph_for_seed(seed, 40);
        let components = component_of(&graph);
        for spec in specs(seed) {
            let clustering = cluster(&graph, &spec);
            assert!(covers(&clustering, &graph), "seed {seed}");
            for members in clustering.clusters() {
                let indices: BTreeSet<usize> =
                    members.iter().map(|m| components[m.as_str()]).collect();
                assert_eq!(
                    indices.len(),
                    1,
                    "seed {seed} algorithm {:?} cluster {members:?}",
                    spec.algorithm
                );
            }
        }
    }
}

#[test]
fn identical_inputs_give_identical_clusterings() {
    for seed in 0..50 {
        let graph = random_graph_for_seed(seed, 40);
        for spec in specs(seed) {
            let one = cluster(&graph, &spec);
            let two = cluster(&graph, &spec);
            let mut bytes_one = Vec::new();
            let mut bytes_two = Vec::new();
            one.write_tsv(&mut bytes_one).unwrap();
            two.write_tsv(&mut bytes_two).unwrap();
            assert_eq!(bytes_one, bytes_two, "seed {seed}");
        }
    }
}

/// Exhaustive oracle for the weakly bridged triangles: breadth-first search
/// over every labeling reachable by single-node majority updates (lowest
/// label on ties) must terminate only in the two-triangle partition, for any
/// visit order.
#[test]
fn bridged_triangles_have_a_unique_reachable_fixpoint() {
    // a,b,c and d,e,f triangles with weight 1.0, bridge c--d with 0.1.
    let nodes = 6usize;
    let edges: Vec<(usize, usize, f64)> = vec![
        (0, 1, 1.0),
        (1, 2, 1.0),
        (0, 2, 1.0),
        (3, 4, 1.0),
        (4, 5, 1.0),
        (3, 5, 1.0),
        (2, 3, 0.1),
    ];
    let neighbors = |u: usize| -> Vec<(usize, f64)> {
        edges
            .iter()
            .filter_map(|&(a, b, w)| {
                if a == u {
                    Some((b, w))
                } else if b == u {
                    Some((a, w))
                } else {
                    None
                }
            })
            .collect()
    };
    let update = |labels: &[usize; 6], u: usize| -> usize {
        let mut scores: std::collections::BTreeMap<usize, f64> = std::collections::BTreeMap::new();
        for (v, w) in neighbors(u) {
            *scores.entry(labels[v]).or_insert(0.0) += w;
        }
        let mut best = usize::MAX;
        let mut best_score = f64::NEG_INFINITY;
        for (&label, &score) in &scores {
            if score > best_score {
                best_score = score;
                best = label;
            }
        }
        best
    };

    let start = [0usize, 1, 2, 3, 4, 5];
    let mut queue = std::collections::VecDeque::from([start]);
    let mut seen = BTreeSet::from([start]);
    let mut fixpoints = BTreeSet::new();
    while let Some(state) = queue.pop_front() {
        let mut any_change = false;
        for u in 0..nodes {
            let best = update(&state, u);
            if best != state[u] {
                any_change = true;
                let mut next = state;
                next[u] = best;
                if seen.insert(next) {
                    queue.push_back(next);
                }
            }
        }
        if !any_change {
            fixpoints.insert(state);
        }
    }

    assert!(!fixpoints.is_empty());
    for state in &fixpoints {
        assert_eq!(state[0], state[1]);
        assert_eq!(state[1], state[2]);
        assert_eq!(state[3], state[4]);
        assert_eq!(state[4], state[5]);
        assert_ne!(state[0], state[3], "fixpoint merges the triangles: {state:?}");
    }

    // and the implementation reaches it for every seed
    let graph = Graph::builder()
        .edge("a", "b")
        .edge("b", "c")
        .edge("a", "c")
        .edge("d", "e")
        .edge("e", "f")
        .edge("d", "f")
        .weighted_edge("c", "d", 0.1)
        .build();
    for seed in 0..100 {
        let spec = ClustererSpec::chinese_whispers(CwWeighting::Top).with_seed(seed);
        let clustering = chinese_whispers(&graph, &spec);
        let got: Vec<Vec<&str>> = clustering
            .clusters()
            .iter()
            .map(|m| m.iter().map(String::as_str).collect())
            .collect();
        assert_eq!(got, vec![vec!["a", "b", "c"], vec!["d", "e", "f"]], "seed {seed}");
    }
}

/// Independent dense-matrix oracle for Markov Clustering on K4 with the
/// default expansion 2 and inflation 2.
#[test]
#[allow(clippy::needless_range_loop)]
fn mcl_matches_a_dense_oracle_on_k4() {
    let n = 4usize;
    // Transition matrix with self-loops, column-stochastic, dense.
    let mut matrix = vec![vec![0.0f64; n]; n];
    for i in 0..n {
        for j in 0..n {
            matrix[i][j] = 1.0; // K4 adjacency plus unit self-loops
        }
    }
    for j in 0..n {
        let sum: f64 = (0..n).map(|i| matrix[i][j]).sum();
        for i in 0..n {
            matrix[i][j] /= sum;
        }
    }
    for _ in 0..100 {
        // expansion: square
        let mut squared = vec![vec![0.0f64; n]; n];
        for i in 0..n {
            for j in 0..n {
                squared[i][j] = (0..n).map(|k| matrix[i][k] * matrix[k][j]).sum();
            }
        }
        // inflation: elementwise square, renormalize columns
        let mut inflated = squared.clone();
        for j in 0..n {
            for row in inflated.iter_mut() {
                row[j] = row[j] * row[j];
            }
            let sum: f64 = (0..n).map(|i| inflated[i][j]).sum();
            for row in inflated.iter_mut() {
                row[j] /= sum;
            }
        }
        let change = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| (inflated[i][j] - matrix[i][j]).abs())
            .fold(0.0f64, f64::max);
        matrix = inflated;
        if change < 1e-5 {
            break;
        }
    }
    let attractors: Vec<usize> = (0..n).filter(|&i| matrix[i][i] > 1e-5).collect();
    let support: BTreeSet<usize> = (0..n).filter(|&j| matrix[attractors[0]][j] > 1e-5).collect();
    assert_eq!(support.len(), n, "oracle expects one cluster of all nodes");

    let graph = Graph::builder()
        .edge("a", "b")
        .edge("a", "c")
        .edge("a", "d")
        .edge("b", "c")
        .edge("b", "d")
        .edge("c", "d")
        .build();
    let clustering = markov_clustering(&graph, &ClustererSpec::markov_clustering());
    assert_eq!(clustering.len(), 1);
    assert_eq!(clustering.clusters()[0].len(), 4);
}

/// The number of clusters a hard algorithm finds never exceeds the number
/// of nodes and never drops below the number of connected components.
#[test]
fn hard_cluster_counts_are_bounded_by_structure() {
    for seed in 0..100 {
        let graph = random_graph_for_seed(seed, 30);
        let components = graph.connected_components().len();
        for spec in specs(seed).into_iter().filter(|s| s.is_hard()) {
            let clustering = cluster(&graph, &spec);
            assert!(clustering.len() >= components, "seed {seed}");
            assert!(clustering.len() <= graph.node_count(), "seed {seed}");
        }
    }
}
