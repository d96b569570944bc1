//! Immutable undirected weighted simple graphs over string node labels.
//!
//! Nodes are identified by their exact label; internally every node gets a
//! dense integer id in first-seen order, and all iteration is defined over
//! ascending ids so downstream algorithms are deterministic. Graphs are
//! immutable after construction and safe to share across worker threads.

use std::collections::BTreeMap;
use std::collections::HashMap;
use std::fmt::Write as _;
use std::io::{self, BufRead, Write};

use thiserror::Error;

/// Dense node identifier, assigned in first-seen order during construction.
pub type NodeId = usize;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("{context}self-loop on node {label:?}")]
    SelfLoop { label: String, context: String },
    #[error("{context}edge {u:?} -- {v:?} has invalid weight {weight} (must be finite and > 0)")]
    BadWeight {
        u: String,
        v: String,
        weight: f64,
        context: String,
    },
    #[error("node {0:?} is not in the graph")]
    UnknownNode(String),
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// One input record: an edge with an optional weight, or an isolated node
/// when `target` is absent.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeRecord {
    pub source: String,
    pub target: Option<String>,
    pub weight: Option<f64>,
}

impl EdgeRecord {
    pub fn edge(source: impl Into<String>, target: impl Into<String>) -> Self {
        Self {
            source: source.into(),
            target: Some(target.into()),
            weight: None,
        }
    }

    pub fn weighted(source: impl Into<String>, target: impl Into<String>, weight: f64) -> Self {
        Self {
            source: source.into(),
            target: Some(target.into()),
            weight: Some(weight),
        }
    }

    pub fn node(label: impl Into<String>) -> Self {
        Self {
            source: label.into(),
            target: None,
            weight: None,
        }
    }
}

/// Summary statistics of a graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GraphStats {
    pub node_count: usize,
    pub edge_count: usize,
    pub max_degree: usize,
}

/// Undirected weighted simple graph.
///
/// Invariants: no self-loops, all weights finite and positive, every edge
/// endpoint is a node. Duplicate records for the same unordered pair merge
/// keeping the maximum weight, so symmetric input files are harmless.
#[derive(Debug, Clone)]
pub struct Graph {
    labels: Vec<String>,
    index: HashMap<String, NodeId>,
    adjacency: Vec<Vec<(NodeId, f64)>>,
    edge_count: usize,
}

/// Incremental constructor used by [`build_graph`] and the TSV reader.
#[derive(Debug, Default)]
pub struct GraphBuilder {
    labels: Vec<String>,
    index: HashMap<String, NodeId>,
    edges: BTreeMap<(NodeId, NodeId), f64>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    fn intern(&mut self, label: &str) -> NodeId {
        if let Some(&id) = self.index.get(label) {
            return id;
        }
        let id = self.labels.len();
        self.labels.push(label.to_owned());
        self.index.insert(label.to_owned(), id);
        id
    }

    /// Adds an isolated node (a no-op if the label is already present).
    pub fn node(mut self, label: &str) -> Self {
        self.intern(label);
        self
    }

    /// Adds an edge with weight 1.0, merging duplicates by maximum weight.
    pub fn edge(self, u: &str, v: &str) -> Self {
        self.weighted_edge(u, v, 1.0)
    }

    pub fn weighted_edge(mut self, u: &str, v: &str, weight: f64) -> Self {
        self.try_edge(u, v, weight, "").expect("invalid edge");
        self
    }

    fn try_edge(&mut self, u: &str, v: &str, weight: f64, context: &str) -> Result<(), GraphError> {
        if u == v {
            return Err(GraphError::SelfLoop {
                label: u.to_owned(),
                context: context.to_owned(),
            });
        }
        if !weight.is_finite() || weight <= 0.0 {
            return Err(GraphError::BadWeight {
                u: u.to_owned(),
                v: v.to_owned(),
                weight,
                context: context.to_owned(),
            });
        }
        let a = self.intern(u);
        let b = self.intern(v);
        let key = (a.min(b), a.max(b));
        let entry = self.edges.entry(key).or_insert(weight);
        if weight > *entry {
            *entry = weight;
        }
        Ok(())
    }

    fn record(&mut self, record: &EdgeRecord, context: &str) -> Result<(), GraphError> {
        match &record.target {
            Some(target) => self.try_edge(
                &record.source,
                target,
                record.weight.unwrap_or(1.0),
                context,
            ),
            None => {
                self.intern(&record.source);
                Ok(())
            }
        }
    }

    pub fn build(self) -> Graph {
        let mut adjacency: Vec<Vec<(NodeId, f64)>> = vec![Vec::new(); self.labels.len()];
        let edge_count = self.edges.len();
        for (&(u, v), &w) in &self.edges {
            adjacency[u].push((v, w));
            adjacency[v].push((u, w));
        }
        for list in &mut adjacency {
            list.sort_unstable_by_key(|&(v, _)| v);
        }
        Graph {
            labels: self.labels,
            index: self.index,
            adjacency,
            edge_count,
        }
    }
}

/// Builds a simple undirected graph from edge records.
///
/// Missing weights default to 1.0; duplicate records for one unordered pair
/// keep the maximum weight; a record without a target declares an isolated
/// node. Self-loops and non-positive or non-finite weights are rejected.
pub fn build_graph(
    records: impl IntoIterator<Item = EdgeRecord>,
) -> Result<Graph, GraphError> {
    let mut builder = GraphBuilder::new();
    for (i, record) in records.into_iter().enumerate() {
        builder.record(&record, &format!("record {}: ", i + 1))?;
    }
    Ok(builder.build())
}

impl Graph {
    pub fn builder() -> GraphBuilder {
        GraphBuilder::new()
    }

    /// Empty graph.
    pub fn empty() -> Graph {
        GraphBuilder::new().build()
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, id: NodeId) -> &str {
        &self.labels[id]
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.labels.iter().map(String::as_str)
    }

    pub fn node_id(&self, label: &str) -> Option<NodeId> {
        self.index.get(label).copied()
    }

    pub fn degree(&self, id: NodeId) -> usize {
        self.adjacency[id].len()
    }

    /// Neighbors of `id` with edge weights, ascending by neighbor id.
    pub fn neighbors(&self, id: NodeId) -> impl Iterator<Item = (NodeId, f64)> + '_ {
        self.adjacency[id].iter().copied()
    }

    /// Weight of the edge `{u, v}`, if present.
    pub fn weight(&self, u: NodeId, v: NodeId) -> Option<f64> {
        self.adjacency[u]
            .binary_search_by_key(&v, |&(n, _)| n)
            .ok()
            .map(|i| self.adjacency[u][i].1)
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.weight(u, v).is_some()
    }

    /// All edges as `(u, v, weight)` with `u < v`, ascending.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId, f64)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, list)| {
                list.iter()
                    .filter(move |&&(v, _)| u < v)
                    .map(move |&(v, w)| (u, v, w))
            })
    }

    /// Open neighborhood graph of `u`: its neighbors (never `u` itself) and
    /// exactly the edges of this graph between them, weights preserved.
    ///
    /// The ego graph's nodes keep ascending parent-id order, so its local ids
    /// line up with `neighbors(u)`.
    pub fn ego_network(&self, u: NodeId) -> Result<Graph, GraphError> {
        if u >= self.labels.len() {
            return Err(GraphError::UnknownNode(format!("#{u}")));
        }
        let members: Vec<NodeId> = self.adjacency[u].iter().map(|&(v, _)| v).collect();
        let mut local = HashMap::with_capacity(members.len());
        for (i, &v) in members.iter().enumerate() {
            local.insert(v, i);
        }
        let mut builder = GraphBuilder::new();
        for &v in &members {
            builder.intern(&self.labels[v]);
        }
        for (i, &v) in members.iter().enumerate() {
            for &(w, weight) in &self.adjacency[v] {
                if w <= v {
                    continue;
                }
                if let Some(&j) = local.get(&w) {
                    builder.edges.insert((i.min(j), i.max(j)), weight);
                }
            }
        }
        Ok(builder.build())
    }

    /// Exact node, edge, and maximum-degree counts.
    pub fn stats(&self) -> GraphStats {
        GraphStats {
            node_count: self.node_count(),
            edge_count: self.edge_count,
            max_degree: self.adjacency.iter().map(Vec::len).max().unwrap_or(0),
        }
    }

    /// Connected components as ascending node-id lists, ordered by smallest
    /// member.
    pub fn connected_components(&self) -> Vec<Vec<NodeId>> {
        let n = self.node_count();
        let mut component = vec![usize::MAX; n];
        let mut components = Vec::new();
        let mut stack = Vec::new();
        for start in 0..n {
            if component[start] != usize::MAX {
                continue;
            }
            let id = components.len();
            let mut members = vec![start];
            component[start] = id;
            stack.push(start);
            while let Some(u) = stack.pop() {
                for &(v, _) in &self.adjacency[u] {
                    if component[v] == usize::MAX {
                        component[v] = id;
                        members.push(v);
                        stack.push(v);
                    }
                }
            }
            members.sort_unstable();
            components.push(members);
        }
        components
    }

    /// Reads the edge-list TSV format: `node<TAB>node<TAB>weight` with the
    /// weight column optional, `#` lines ignored, and a line with an empty
    /// second field declaring an isolated node.
    pub fn read_tsv(reader: impl BufRead) -> Result<Graph, GraphError> {
        let mut builder = GraphBuilder::new();
        for (number, line) in reader.lines().enumerate() {
            let line = line?;
            let number = number + 1;
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.split('\t');
            let source = fields.next().unwrap_or("");
            if source.is_empty() {
                return Err(GraphError::Malformed {
                    line: number,
                    message: "empty node label".into(),
                });
            }
            let target = fields.next();
            let weight = match fields.next() {
                Some(text) if !text.is_empty() => {
                    Some(text.parse::<f64>().map_err(|_| GraphError::Malformed {
                        line: number,
                        message: format!("invalid weight {text:?}"),
                    })?)
                }
                _ => None,
            };
            if fields.next().is_some() {
                return Err(GraphError::Malformed {
                    line: number,
                    message: "too many columns".into(),
                });
            }
            let record = match target {
                Some("") | None => EdgeRecord::node(source),
                Some(target) => EdgeRecord {
                    source: source.to_owned(),
                    target: Some(target.to_owned()),
                    weight,
                },
            };
            builder.record(&record, &format!("line {number}: "))?;
        }
        Ok(builder.build())
    }

    pub fn parse_tsv(text: &str) -> Result<Graph, GraphError> {
        Self::read_tsv(text.as_bytes())
    }

    /// Writes the same edge-list TSV format, edges ascending by id pair and
    /// isolated nodes as single-field lines. Labels containing tabs or
    /// newlines cannot be represented in this format.
    pub fn write_tsv(&self, mut writer: impl Write) -> io::Result<()> {
        let mut out = String::new();
        for (u, v, w) in self.edges() {
            writeln!(out, "{}\t{}\t{}", self.labels[u], self.labels[v], w).unwrap();
        }
        for (id, label) in self.labels.iter().enumerate() {
            if self.adjacency[id].is_empty() {
                writeln!(out, "{label}\t").unwrap();
            }
        }
        writer.write_all(out.as_bytes())
    }
}
