//! Clusterings: ordered collections of node sets, hard or fuzzy.
//!
//! A clustering is stored in canonical form: members of each cluster are
//! sorted and deduplicated, and clusters are ordered by descending size then
//! lexicographic member comparison. Canonicalization makes outputs stable
//! across runs and worker counts.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::io::{self, BufRead, Write};

use crate::graph::{Graph, NodeId};

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Clustering {
    clusters: Vec<Vec<String>>,
}

impl Clustering {
    /// Canonicalizes a list of label clusters. Empty clusters are dropped;
    /// duplicate clusters are kept (a clustering is an ordered list).
    pub fn from_label_clusters(clusters: Vec<Vec<String>>) -> Self {
        let mut clusters: Vec<Vec<String>> = clusters
            .into_iter()
            .map(|mut members| {
                members.sort_unstable();
                members.dedup();
                members
            })
            .filter(|members| !members.is_empty())
            .collect();
        clusters.sort_unstable_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        Self { clusters }
    }

    /// Maps id clusters over a graph's labels and canonicalizes.
    pub fn from_id_clusters(graph: &Graph, clusters: Vec<Vec<NodeId>>) -> Self {
        Self::from_label_clusters(
            clusters
                .into_iter()
                .map(|ids| ids.into_iter().map(|id| graph.label(id).to_owned()).collect())
                .collect(),
        )
    }

    pub fn clusters(&self) -> &[Vec<String>] {
        &self.clusters
    }

    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    /// Distinct labels across all clusters.
    pub fn vocabulary(&self) -> BTreeSet<&str> {
        self.clusters
            .iter()
            .flat_map(|c| c.iter().map(String::as_str))
            .collect()
    }

    /// Clusters containing the given label.
    pub fn clusters_with(&self, label: &str) -> Vec<usize> {
        self.clusters
            .iter()
            .enumerate()
            .filter(|(_, members)| members.binary_search_by(|m| m.as_str().cmp(label)).is_ok())
            .map(|(i, _)| i)
            .collect()
    }

    /// Restricts every cluster to the given vocabulary, dropping clusters
    /// that become empty.
    pub fn retain_vocabulary(&self, vocabulary: &BTreeSet<&str>) -> Clustering {
        Clustering::from_label_clusters(
            self.clusters
                .iter()
                .map(|members| {
                    members
                        .iter()
                        .filter(|m| vocabulary.contains(m.as_str()))
                        .cloned()
                        .collect()
                })
                .collect(),
        )
    }

    /// Drops clusters of size >= `threshold`; returns the survivor and how
    /// many clusters were removed.
    pub fn prune_max_cluster(&self, threshold: usize) -> (Clustering, usize) {
        let kept: Vec<Vec<String>> = self
            .clusters
            .iter()
            .filter(|members| members.len() < threshold)
            .cloned()
            .collect();
        let pruned = self.clusters.len() - kept.len();
        (Clustering { clusters: kept }, pruned)
    }

    /// Writes the clustering TSV format: one cluster per line,
    /// `cluster_id<TAB>size<TAB>member, member, ...`, clusters in canonical
    /// order and ids starting at 1.
    ///
    /// The format has no escaping, so labels containing commas or tabs do
    /// not survive a round trip through [`Clustering::read_tsv`].
    pub fn write_tsv(&self, mut writer: impl Write) -> io::Result<()> {
        let mut out = String::new();
        for (i, members) in self.clusters.iter().enumerate() {
            writeln!(out, "{}\t{}\t{}", i + 1, members.len(), members.join(", ")).unwrap();
        }
        writer.write_all(out.as_bytes())
    }

    pub fn read_tsv(reader: impl BufRead) -> Result<Clustering, ClusteringReadError> {
        let mut clusters = Vec::new();
        for (number, line) in reader.lines().enumerate() {
            let line = line.map_err(ClusteringReadError::Io)?;
            let number = number + 1;
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.split('\t');
            let _id = fields.next();
            let _size = fields.next();
            let members = fields.next().ok_or(ClusteringReadError::Malformed {
                line: number,
                message: "expected cluster_id<TAB>size<TAB>members".into(),
            })?;
            let members: Vec<String> = members
                .split(',')
                .map(|m| m.trim().to_owned())
                .filter(|m| !m.is_empty())
                .collect();
            if members.is_empty() {
                return Err(ClusteringReadError::Malformed {
                    line: number,
                    message: "empty cluster".into(),
                });
            }
            clusters.push(members);
        }
        Ok(Clustering::from_label_clusters(clusters))
    }

    pub fn parse_tsv(text: &str) -> Result<Clustering, ClusteringReadError> {
        Self::read_tsv(text.as_bytes())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ClusteringReadError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}
