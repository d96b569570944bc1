//! Shared generators for the property suites.
#![allow(dead_code)]


use watset::graph::Graph;
use watset::rng::SplitMix64;

/// Erdos-Renyi-style random graph with `n` nodes, edge probability `p`, and
/// weights drawn from (0, 2]. Every node is materialized, so isolated nodes
/// occur naturally.
pub fn random_graph(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = SplitMix64::new(seed);
    let mut builder = Graph::builder();
    for i in 0..n {
        builder = builder.node(&format!("n{i}"));
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if (rng.next_u64() as f64 / u64::MAX as f64) < p {
                let weight = (rng.next_u64() as f64 / u64::MAX as f64) * 2.0;
                if weight > 0.0 {
                    builder = builder.weighted_edge(&format!("n{i}"), &format!("n{j}"), weight);
                }
            }
        }
    }
    builder.build()
}

/// Random graph whose size and density vary with the seed; at most
/// `max_nodes` nodes.
pub fn random_graph_for_seed(seed: u64, max_nodes: usize) -> Graph {
    let mut rng = SplitMix64::new(seed);
    let n = 1 + rng.index(max_nodes);
    let p = match rng.index(3) {
        0 => 0.08,
        1 => 0.2,
        _ => 0.5,
    };
    random_graph(n, p, seed ^ 0xd1b5_4a32_d192_ed03)
}

/// Disjoint cliques of the given sizes, unit weights.
pub fn disjoint_cliques(sizes: &[usize]) -> Graph {
    let mut builder = Graph::builder();
    let mut next = 0;
    for &size in sizes {
        let members: Vec<String> = (next..next + size).map(|i| format!("n{i}")).collect();
        next += size;
        if size == 1 {
            builder = builder.node(&members[0]);
            continue;
        }
        for i in 0..size {
            for j in (i + 1)..size {
                builder = builder.edge(&members[i], &members[j]);
            }
        }
    }
    builder.build()
}

/// Component index of every node, keyed by label.
pub fn component_of(graph: &Graph) -> std::collections::HashMap<String, usize> {
    let mut map = std::collections::HashMap::new();
    for (index, members) in graph.connected_components().into_iter().enumerate() {
        for id in members {
            map.insert(graph.label(id).to_owned(), index);
        }
    }
    map
}
