//! Watset: fuzzy graph clustering through node sense induction.
//!
//! The local step clusters every node's open neighborhood with a hard
//! clusterer; each resulting cluster becomes the context of one sense of the
//! node. The global step connects senses into a sense graph, clusters it
//! with a hard clusterer, and removes the sense labels, which yields soft
//! clusters of the original nodes: an ambiguous node ends up in one cluster
//! per sense.
//!
//! Two variants build the sense graph. The full variant disambiguates every
//! context element by context similarity; the simplified variant skips the
//! similarity computation entirely and looks the sense indices up in the
//! records kept during induction, producing exactly one sense edge per input
//! edge.
//!
//! Sense induction and disambiguation run per node / per sense on a worker
//! pool; per-node RNG streams are derived from the seed and the node id, so
//! the output never depends on scheduling.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use thiserror::Error;

use crate::clusterers::{self, ClustererSpec};
use crate::clustering::Clustering;
use crate::graph::{Graph, NodeId};
use crate::rng::stream_seed;

/// One sense of a node: the node plus a 1-based sense index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sense {
    pub node: NodeId,
    pub index: usize,
}

#[derive(Debug, Error)]
pub enum WatsetError {
    #[error("unknown sense: node #{node} index {index}")]
    UnknownSense { node: NodeId, index: usize },
    #[error("node #{0} is not covered by the sense inventory")]
    InventoryMismatch(NodeId),
    #[error("invalid sense label {0:?}")]
    BadSenseLabel(String),
}

/// Similarity measure between sparse context vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Similarity {
    #[default]
    Cosine,
    Jaccard,
    Dot,
}

impl Similarity {
    /// Similarity of two sparse vectors sorted by id. Two empty contexts
    /// have similarity 0 by convention.
    pub fn of(self, a: &[(NodeId, f64)], b: &[(NodeId, f64)]) -> f64 {
        let mut dot = 0.0;
        let mut sum_min = 0.0;
        let mut sum_max = 0.0;
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            let (ka, va) = a[i];
            let (kb, vb) = b[j];
            if ka == kb {
                dot += va * vb;
                sum_min += va.min(vb);
                sum_max += va.max(vb);
                i += 1;
                j += 1;
            } else if ka < kb {
                sum_max += va;
                i += 1;
            } else {
                sum_max += vb;
                j += 1;
            }
        }
        sum_max += a[i..].iter().map(|&(_, v)| v).sum::<f64>();
        sum_max += b[j..].iter().map(|&(_, v)| v).sum::<f64>();
        match self {
            Similarity::Dot => dot,
            Similarity::Cosine => {
                let na = a.iter().map(|&(_, v)| v * v).sum::<f64>().sqrt();
                let nb = b.iter().map(|&(_, v)| v * v).sum::<f64>().sqrt();
                if na == 0.0 || nb == 0.0 {
                    0.0
                } else {
                    dot / (na * nb)
                }
            }
            Similarity::Jaccard => {
                if sum_max == 0.0 {
                    0.0
                } else {
                    sum_min / sum_max
                }
            }
        }
    }
}

/// Sense-graph construction strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Variant {
    Full,
    #[default]
    Simplified,
}

/// Full configuration of a Watset run.
#[derive(Debug, Clone)]
pub struct WatsetSpec {
    pub local: ClustererSpec,
    pub global: ClustererSpec,
    pub similarity: Similarity,
    pub variant: Variant,
}

impl Default for WatsetSpec {
    fn default() -> Self {
        Self {
            local: ClustererSpec::default(),
            global: ClustererSpec::default(),
            similarity: Similarity::Cosine,
            variant: Variant::Simplified,
        }
    }
}

impl WatsetSpec {
    pub fn new(local: ClustererSpec, global: ClustererSpec) -> Self {
        Self {
            local,
            global,
            ..Self::default()
        }
    }

    pub fn with_variant(mut self, variant: Variant) -> Self {
        self.variant = variant;
        self
    }

    /// Seeds both clusterers from one value. The local seed is fanned out
    /// per node during induction; the global clusterer receives it as-is.
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.local.seed = seed;
        self.global.seed = seed;
        self
    }
}

/// The senses of every node of a graph.
///
/// For each node, the contexts of its senses partition its neighbor set; a
/// context entry carries the input edge weight. Isolated nodes get exactly
/// one sense with an empty context.
#[derive(Debug, Clone)]
pub struct SenseInventory {
    /// node -> sense (0-based) -> sorted (neighbor, input edge weight)
    contexts: Vec<Vec<Vec<(NodeId, f64)>>>,
    /// node -> neighbor -> 1-based index of the sense whose context holds it
    sense_index: Vec<HashMap<NodeId, usize>>,
    /// prefix sums of sense counts; the last entry is the total
    offsets: Vec<usize>,
}

impl SenseInventory {
    pub fn node_count(&self) -> usize {
        self.contexts.len()
    }

    pub fn sense_count(&self, node: NodeId) -> usize {
        self.contexts[node].len()
    }

    pub fn total_senses(&self) -> usize {
        *self.offsets.last().unwrap_or(&0)
    }

    pub fn senses(&self, node: NodeId) -> impl Iterator<Item = Sense> + '_ {
        (1..=self.sense_count(node)).map(move |index| Sense { node, index })
    }

    pub fn all_senses(&self) -> impl Iterator<Item = Sense> + '_ {
        (0..self.node_count()).flat_map(move |node| self.senses(node))
    }

    pub fn contains(&self, sense: Sense) -> bool {
        sense.node < self.contexts.len()
            && sense.index >= 1
            && sense.index <= self.contexts[sense.node].len()
    }

    /// Context of a sense: its neighbors with input edge weights.
    pub fn context(&self, sense: Sense) -> Result<&[(NodeId, f64)], WatsetError> {
        if !self.contains(sense) {
            return Err(WatsetError::UnknownSense {
                node: sense.node,
                index: sense.index,
            });
        }
        Ok(&self.contexts[sense.node][sense.index - 1])
    }

    /// The sense of `node` whose context contains `neighbor` (defined iff
    /// `{node, neighbor}` is an input edge).
    pub fn sense_of_neighbor(&self, node: NodeId, neighbor: NodeId) -> Option<Sense> {
        self.sense_index
            .get(node)?
            .get(&neighbor)
            .map(|&index| Sense { node, index })
    }

    /// Dense id of a sense inside the sense graph: node-major, index-minor.
    pub fn global_id(&self, sense: Sense) -> usize {
        self.offsets[sense.node] + sense.index - 1
    }

    pub fn sense_from_global(&self, id: usize) -> Sense {
        // Every node has at least one sense, so the offsets are strictly
        // increasing and the lookup is unambiguous.
        let node = match self.offsets.binary_search(&id) {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        Sense {
            node,
            index: id - self.offsets[node] + 1,
        }
    }
}

/// Clusters every node's open neighborhood and records the resulting senses.
///
/// Sense indices are canonical: local clusters are ordered by descending
/// size, then by their lexicographically smallest member label, before the
/// indices 1..n are assigned.
pub fn induce_senses(graph: &Graph, local: &ClustererSpec) -> SenseInventory {
    let n = graph.node_count();
    let contexts: Vec<Vec<Vec<(NodeId, f64)>>> = (0..n)
        .into_par_iter()
        .map(|u| {
            let ego = graph.ego_network(u).expect("node id in range");
            if ego.is_empty() {
                return vec![Vec::new()];
            }
            let members: Vec<NodeId> = graph.neighbors(u).map(|(v, _)| v).collect();
            let spec = local.clone().with_seed(stream_seed(local.seed, u as u64));
            let mut clusters: Vec<Vec<NodeId>> = clusterers::cluster_ids(&ego, &spec)
                .into_iter()
                .map(|cluster| {
                    let mut ids: Vec<NodeId> =
                        cluster.into_iter().map(|local_id| members[local_id]).collect();
                    ids.sort_unstable();
                    ids
                })
                .collect();
            clusters.sort_by(|a, b| {
                b.len()
                    .cmp(&a.len())
                    .then_with(|| min_label(graph, a).cmp(min_label(graph, b)))
            });
            clusters
                .into_iter()
                .map(|ids| {
                    ids.into_iter()
                        .map(|v| (v, graph.weight(u, v).expect("neighbor edge")))
                        .collect()
                })
                .collect()
        })
        .collect();

    let mut sense_index = Vec::with_capacity(n);
    let mut offsets = Vec::with_capacity(n + 1);
    let mut total = 0;
    for node_contexts in &contexts {
        offsets.push(total);
        total += node_contexts.len();
        let mut index = HashMap::new();
        for (i, context) in node_contexts.iter().enumerate() {
            for &(v, _) in context {
                index.insert(v, i + 1);
            }
        }
        sense_index.push(index);
    }
    offsets.push(total);

    SenseInventory {
        contexts,
        sense_index,
        offsets,
    }
}

fn min_label<'a>(graph: &'a Graph, ids: &[NodeId]) -> &'a str {
    ids.iter()
        .map(|&v| graph.label(v))
        .min()
        .expect("non-empty cluster")
}

/// Context of a sense as a sparse vector; with `include_target` the sense's
/// own node is added with weight 1.0, the way disambiguation sees it.
pub fn context_vector(
    inventory: &SenseInventory,
    sense: Sense,
    include_target: bool,
) -> Result<Vec<(NodeId, f64)>, WatsetError> {
    let context = inventory.context(sense)?;
    if !include_target {
        return Ok(context.to_vec());
    }
    let mut vector = Vec::with_capacity(context.len() + 1);
    let mut inserted = false;
    for &(v, w) in context {
        if !inserted && v > sense.node {
            vector.push((sense.node, 1.0));
            inserted = true;
        }
        vector.push((v, w));
    }
    if !inserted {
        vector.push((sense.node, 1.0));
    }
    Ok(vector)
}

/// Picks the sense of `v` whose context is most similar to the target
/// sense's context (with the target node temporarily inserted). Ties go to
/// the lowest sense index.
pub fn disambiguate(
    inventory: &SenseInventory,
    target: Sense,
    v: NodeId,
    similarity: Similarity,
) -> Result<Sense, WatsetError> {
    if v >= inventory.node_count() || inventory.sense_count(v) == 0 {
        return Err(WatsetError::InventoryMismatch(v));
    }
    let reference = context_vector(inventory, target, true)?;
    let mut best = Sense { node: v, index: 1 };
    let mut best_score = f64::NEG_INFINITY;
    for candidate in inventory.senses(v) {
        let score = similarity.of(&reference, inventory.context(candidate)?);
        if score > best_score {
            best_score = score;
            best = candidate;
        }
    }
    Ok(best)
}

/// Sense-labeled intermediate graph.
///
/// Nodes are senses (labeled `word#index`), and every edge delabels to an
/// input edge with the same weight.
#[derive(Debug, Clone)]
pub struct SenseGraph {
    graph: Graph,
    senses: Vec<Sense>,
}

impl SenseGraph {
    /// The sense graph as an ordinary graph over `word#index` labels.
    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    /// Sense behind a sense-graph node id.
    pub fn sense(&self, id: NodeId) -> Sense {
        self.senses[id]
    }

    /// Disambiguated context of a sense: the senses it is connected to.
    pub fn disambiguated_context(&self, sense: Sense) -> Vec<Sense> {
        let id = self
            .senses
            .iter()
            .position(|&s| s == sense)
            .expect("sense in graph");
        self.graph
            .neighbors(id)
            .map(|(v, _)| self.senses[v])
            .collect()
    }
}

/// Builds the sense graph for the configured variant.
///
/// Full: every context element of every sense is disambiguated and linked.
/// Simplified: every input edge `{u, v}` becomes exactly the edge between
/// the sense of `u` containing `v` and the sense of `v` containing `u`.
/// Both copy the input edge weight.
pub fn build_sense_graph(graph: &Graph, inventory: &SenseInventory, spec: &WatsetSpec) -> SenseGraph {
    let senses: Vec<Sense> = inventory.all_senses().collect();
    let labels: Vec<String> = senses
        .iter()
        .map(|s| sense_label(graph.label(s.node), s.index))
        .collect();

    let mut edges: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    match spec.variant {
        Variant::Simplified => {
            for (u, v, w) in graph.edges() {
                let su = inventory
                    .sense_of_neighbor(u, v)
                    .expect("edge endpoint in inventory");
                let sv = inventory
                    .sense_of_neighbor(v, u)
                    .expect("edge endpoint in inventory");
                let a = inventory.global_id(su);
                let b = inventory.global_id(sv);
                let previous = edges.insert((a.min(b), a.max(b)), w);
                debug_assert!(previous.is_none(), "one sense edge per input edge");
            }
        }
        Variant::Full => {
            let per_sense: Vec<Vec<(usize, usize, f64)>> = senses
                .par_iter()
                .map(|&sense| {
                    let a = inventory.global_id(sense);
                    inventory
                        .context(sense)
                        .expect("sense in inventory")
                        .iter()
                        .map(|&(v, w)| {
                            let picked = disambiguate(inventory, sense, v, spec.similarity)
                                .expect("inventory covers the graph");
                            let b = inventory.global_id(picked);
                            (a.min(b), a.max(b), w)
                        })
                        .collect()
                })
                .collect();
            for (a, b, w) in per_sense.into_iter().flatten() {
                let previous = edges.insert((a, b), w);
                debug_assert!(previous.is_none_or(|p| p == w));
            }
        }
    }

    let mut builder = Graph::builder();
    for label in &labels {
        builder = builder.node(label);
    }
    for (&(a, b), &w) in &edges {
        builder = builder.weighted_edge(&labels[a], &labels[b], w);
    }
    SenseGraph {
        graph: builder.build(),
        senses,
    }
}

/// Runs the whole meta-algorithm: induce senses, build the sense graph,
/// cluster it with the global clusterer, and remove the sense labels.
///
/// Every input node appears in at least one output cluster, and a node lands
/// in several clusters only if it has several senses.
pub fn watset(graph: &Graph, spec: &WatsetSpec) -> Clustering {
    let inventory = induce_senses(graph, &spec.local);
    let sense_graph = build_sense_graph(graph, &inventory, spec);
    let sense_clusters = clusterers::cluster_ids(sense_graph.graph(), &spec.global);

    let mut clusters: Vec<Vec<String>> = sense_clusters
        .into_iter()
        .map(|ids| {
            let mut members: Vec<String> = ids
                .into_iter()
                .map(|id| graph.label(sense_graph.sense(id).node).to_owned())
                .collect();
            members.sort_unstable();
            members.dedup();
            members
        })
        .collect();
    // Distinct sense clusters can delabel to the same node set; the output
    // is a set of clusters.
    clusters.sort_unstable();
    clusters.dedup();
    Clustering::from_label_clusters(clusters)
}

/// Formats a sense as `word#index`, escaping `#` inside the word as `##`.
pub fn sense_label(word: &str, index: usize) -> String {
    let mut label = String::with_capacity(word.len() + 3);
    for ch in word.chars() {
        label.push(ch);
        if ch == '#' {
            label.push('#');
        }
    }
    label.push('#');
    label.push_str(&index.to_string());
    label
}

/// Parses a `word#index` sense label back into its parts.
pub fn parse_sense_label(label: &str) -> Result<(String, usize), WatsetError> {
    let bad = || WatsetError::BadSenseLabel(label.to_owned());
    let separator = label.rfind('#').ok_or_else(bad)?;
    let digits = &label[separator + 1..];
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let index: usize = digits.parse().map_err(|_| bad())?;
    if index == 0 {
        return Err(bad());
    }
    let escaped = &label[..separator];
    // The escaped word must contain only even runs of '#'.
    let mut word = String::with_capacity(escaped.len());
    let mut chars = escaped.chars();
    while let Some(ch) = chars.next() {
        if ch == '#' && chars.next() != Some('#') {
            return Err(bad());
        }
        word.push(ch);
    }
    Ok((word, index))
}
