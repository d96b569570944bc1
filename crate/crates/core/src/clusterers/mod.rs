//! Hard and fuzzy graph clustering algorithms.
//!
//! Chinese Whispers and Markov Clustering produce hard partitions; MaxMax is
//! fuzzy. All three are pure functions of `(Graph, ClustererSpec)`: identical
//! inputs and seed give identical output, and distinct inputs can be
//! clustered concurrently.

mod cw;
mod maxmax;
mod mcl;

pub(crate) use cw::chinese_whispers_ids;
pub(crate) use maxmax::maxmax_ids;
pub(crate) use mcl::markov_clustering_ids;

use crate::clustering::Clustering;
use crate::graph::{Graph, NodeId};

/// Which algorithm to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    ChineseWhispers,
    MarkovClustering,
    MaxMax,
}

/// Neighbor weighting used by Chinese Whispers when summing label scores.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CwWeighting {
    /// Plain edge weight.
    #[default]
    Top,
    /// Edge weight divided by the neighbor's degree.
    Lin,
    /// Edge weight divided by `ln(1 + degree)` of the neighbor.
    Log,
}

/// Algorithm selection plus every tunable the clusterers expose.
#[derive(Debug, Clone)]
pub struct ClustererSpec {
    pub algorithm: Algorithm,
    pub cw_weighting: CwWeighting,
    pub cw_max_iterations: usize,
    pub mcl_expansion: u32,
    pub mcl_inflation: f64,
    pub mcl_epsilon: f64,
    pub mcl_max_iterations: usize,
    pub seed: u64,
}

impl Default for ClustererSpec {
    fn default() -> Self {
        Self {
            algorithm: Algorithm::ChineseWhispers,
            cw_weighting: CwWeighting::Top,
            cw_max_iterations: 20,
            mcl_expansion: 2,
            mcl_inflation: 2.0,
            mcl_epsilon: 1e-5,
            mcl_max_iterations: 100,
            seed: 0,
        }
    }
}

impl ClustererSpec {
    pub fn chinese_whispers(weighting: CwWeighting) -> Self {
        Self {
            algorithm: Algorithm::ChineseWhispers,
            cw_weighting: weighting,
            ..Self::default()
        }
    }

    pub fn markov_clustering() -> Self {
        Self {
            algorithm: Algorithm::MarkovClustering,
            ..Self::default()
        }
    }

    pub fn maxmax() -> Self {
        Self {
            algorithm: Algorithm::MaxMax,
            ..Self::default()
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Whether the algorithm always produces a disjoint partition.
    pub fn is_hard(&self) -> bool {
        !matches!(self.algorithm, Algorithm::MaxMax)
    }

    fn validate(&self) {
        assert!(self.cw_max_iterations >= 1, "cw_max_iterations must be >= 1");
        assert!(self.mcl_expansion >= 2, "mcl_expansion must be >= 2");
        assert!(self.mcl_inflation > 1.0, "mcl_inflation must be > 1");
    }
}

/// Runs the configured algorithm and returns the canonical clustering.
pub fn cluster(graph: &Graph, spec: &ClustererSpec) -> Clustering {
    Clustering::from_id_clusters(graph, cluster_ids(graph, spec))
}

/// Id-level entry point shared with the sense-graph pipeline.
pub(crate) fn cluster_ids(graph: &Graph, spec: &ClustererSpec) -> Vec<Vec<NodeId>> {
    spec.validate();
    match spec.algorithm {
        Algorithm::ChineseWhispers => chinese_whispers_ids(graph, spec),
        Algorithm::MarkovClustering => markov_clustering_ids(graph, spec),
        Algorithm::MaxMax => maxmax_ids(graph, spec),
    }
}

/// Chinese Whispers label propagation (hard).
pub fn chinese_whispers(graph: &Graph, spec: &ClustererSpec) -> Clustering {
    Clustering::from_id_clusters(graph, chinese_whispers_ids(graph, spec))
}

/// Markov Clustering by expansion and inflation of the transition matrix
/// (hard).
pub fn markov_clustering(graph: &Graph, spec: &ClustererSpec) -> Clustering {
    Clustering::from_id_clusters(graph, markov_clustering_ids(graph, spec))
}

/// MaxMax maximal-affinity clustering (fuzzy).
pub fn maxmax(graph: &Graph, spec: &ClustererSpec) -> Clustering {
    Clustering::from_id_clusters(graph, maxmax_ids(graph, spec))
}
