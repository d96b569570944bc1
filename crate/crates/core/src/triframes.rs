//! Frame induction from subject-verb-object triples.
//!
//! Every triple is embedded as the concatenation of its three word vectors,
//! a k-nearest-neighbor graph over the triples is built by cosine
//! similarity, the graph is clustered (typically with Watset), and each
//! cluster is aggregated into a triframe: the sets of its subjects, verbs,
//! and objects.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::BufRead;

use rayon::prelude::*;
use thiserror::Error;

use crate::clusterers::{self, ClustererSpec};
use crate::clustering::Clustering;
use crate::graph::{Graph, GraphError};
use crate::watset::{watset, WatsetSpec};

#[derive(Debug, Error)]
pub enum TriframesError {
    #[error("triple field must be non-empty")]
    EmptyField,
    #[error("line {line}: expected subject<TAB>verb<TAB>object")]
    MalformedTriple { line: usize },
    #[error("line {line}: {message}")]
    MalformedEmbedding { line: usize, message: String },
    #[error("embedding dimension must be positive")]
    ZeroDimension,
    #[error("fewer than 2 embeddable triples ({0} after out-of-vocabulary filtering)")]
    TooFewTriples(usize),
    #[error("cluster member {0:?} is not a serialized triple")]
    BadTripleLabel(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// An SVO triple. Compared by value; all fields are non-empty.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triple {
    pub subject: String,
    pub verb: String,
    pub object: String,
}

const SEPARATOR: char = '\u{1f}';

impl Triple {
    pub fn new(
        subject: impl Into<String>,
        verb: impl Into<String>,
        object: impl Into<String>,
    ) -> Result<Triple, TriframesError> {
        let triple = Triple {
            subject: subject.into(),
            verb: verb.into(),
            object: object.into(),
        };
        if triple.subject.is_empty() || triple.verb.is_empty() || triple.object.is_empty() {
            return Err(TriframesError::EmptyField);
        }
        Ok(triple)
    }

    /// Serializes for use as a graph node label: fields joined with the unit
    /// separator, with embedded separators and backslashes escaped so the
    /// label parses back unambiguously.
    pub fn encode(&self) -> String {
        fn escape(field: &str, out: &mut String) {
            for ch in field.chars() {
                match ch {
                    '\\' => out.push_str("\\\\"),
                    SEPARATOR => out.push_str("\\s"),
                    _ => out.push(ch),
                }
            }
        }
        let mut label = String::new();
        escape(&self.subject, &mut label);
        label.push(SEPARATOR);
        escape(&self.verb, &mut label);
        label.push(SEPARATOR);
        escape(&self.object, &mut label);
        label
    }

    pub fn decode(label: &str) -> Result<Triple, TriframesError> {
        let bad = || TriframesError::BadTripleLabel(label.to_owned());
        let mut fields = Vec::with_capacity(3);
        let mut current = String::new();
        let mut chars = label.chars();
        while let Some(ch) = chars.next() {
            match ch {
                '\\' => match chars.next() {
                    Some('\\') => current.push('\\'),
                    Some('s') => current.push(SEPARATOR),
                    _ => return Err(bad()),
                },
                SEPARATOR => fields.push(std::mem::take(&mut current)),
                _ => current.push(ch),
            }
        }
        fields.push(current);
        if fields.len() != 3 {
            return Err(bad());
        }
        let mut fields = fields.into_iter();
        Triple::new(
            fields.next().unwrap(),
            fields.next().unwrap(),
            fields.next().unwrap(),
        )
        .map_err(|_| bad())
    }
}

/// Word embedding model: a fixed dimension and one vector per word.
#[derive(Debug, Clone)]
pub struct EmbeddingModel {
    dimension: usize,
    vectors: HashMap<String, Vec<f64>>,
}

impl EmbeddingModel {
    pub fn new(dimension: usize) -> Result<Self, TriframesError> {
        if dimension == 0 {
            return Err(TriframesError::ZeroDimension);
        }
        Ok(Self {
            dimension,
            vectors: HashMap::new(),
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vector(&self, word: &str) -> Option<&[f64]> {
        self.vectors.get(word).map(Vec::as_slice)
    }

    /// Inserts a vector; the first occurrence of a word wins.
    pub fn insert(&mut self, word: impl Into<String>, vector: Vec<f64>) -> bool {
        assert_eq!(vector.len(), self.dimension, "vector length mismatch");
        assert!(vector.iter().all(|v| v.is_finite()), "non-finite entry");
        match self.vectors.entry(word.into()) {
            std::collections::hash_map::Entry::Occupied(_) => false,
            std::collections::hash_map::Entry::Vacant(slot) => {
                slot.insert(vector);
                true
            }
        }
    }

    /// Reads the word2vec text format: a `vocab_size dimension` header line,
    /// then one `word v1 v2 ... vd` line per word, space-separated.
    /// Duplicate words keep their first vector; the number of duplicates is
    /// returned alongside the model.
    pub fn read_word2vec_text(reader: impl BufRead) -> Result<(Self, usize), TriframesError> {
        let mut lines = reader.lines().enumerate();
        let (_, header) = lines.next().ok_or(TriframesError::MalformedEmbedding {
            line: 1,
            message: "empty file".into(),
        })?;
        let header = header?;
        let mut parts = header.split_whitespace();
        let _vocab: usize = parts
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or(TriframesError::MalformedEmbedding {
                line: 1,
                message: "expected `vocab_size dimension` header".into(),
            })?;
        let dimension: usize = parts
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or(TriframesError::MalformedEmbedding {
                line: 1,
                message: "expected `vocab_size dimension` header".into(),
            })?;
        let mut model = EmbeddingModel::new(dimension)?;
        let mut duplicates = 0;
        for (number, line) in lines {
            let line = line?;
            let number = number + 1;
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let word = parts.next().ok_or(TriframesError::MalformedEmbedding {
                line: number,
                message: "missing word".into(),
            })?;
            let values: Result<Vec<f64>, _> = parts.map(str::parse::<f64>).collect();
            let values = values.map_err(|e| TriframesError::MalformedEmbedding {
                line: number,
                message: e.to_string(),
            })?;
            if values.len() != dimension {
                return Err(TriframesError::MalformedEmbedding {
                    line: number,
                    message: format!("expected {dimension} values, found {}", values.len()),
                });
            }
            if values.iter().any(|v| !v.is_finite()) {
                return Err(TriframesError::MalformedEmbedding {
                    line: number,
                    message: "non-finite vector entry".into(),
                });
            }
            if !model.insert(word, values) {
                duplicates += 1;
            }
        }
        Ok((model, duplicates))
    }
}

/// A frame: the subjects, verbs, and objects aggregated from one cluster of
/// triples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Triframe {
    pub subjects: BTreeSet<String>,
    pub verbs: BTreeSet<String>,
    pub objects: BTreeSet<String>,
}

/// Clustering algorithm driving the triple graph clustering step.
#[derive(Debug, Clone)]
pub enum FrameClusterer {
    Watset(WatsetSpec),
    Hard(ClustererSpec),
}

/// Configuration of the frame induction pipeline.
#[derive(Debug, Clone)]
pub struct TriframesSpec {
    /// Nearest neighbors per triple when wiring the graph.
    pub k: usize,
    pub clusterer: FrameClusterer,
}

impl Default for TriframesSpec {
    fn default() -> Self {
        Self {
            k: 30,
            clusterer: FrameClusterer::Watset(WatsetSpec::default()),
        }
    }
}

/// Concatenation `vec(subject) ++ vec(verb) ++ vec(object)`, of length 3d.
/// Out-of-vocabulary words produce an error naming the word so the pipeline
/// can report and skip the triple.
pub fn embed_triple(model: &EmbeddingModel, triple: &Triple) -> Result<Vec<f64>, String> {
    let mut embedded = Vec::with_capacity(3 * model.dimension());
    for word in [&triple.subject, &triple.verb, &triple.object] {
        match model.vector(word) {
            Some(vector) => embedded.extend_from_slice(vector),
            None => return Err(word.clone()),
        }
    }
    Ok(embedded)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Builds the undirected k-NN triple graph.
///
/// Exact brute-force search: for each embeddable triple the k most cosine-
/// similar other triples are selected (ties at the k-th rank keep the
/// lexicographically smaller serialized triple), and each selection becomes
/// an undirected edge weighted by the similarity. Selections with
/// non-positive similarity are dropped, since edges carry positive weights.
/// Returns the graph together with the skipped out-of-vocabulary triples
/// and their first missing word.
pub fn knn_triple_graph(
    triples: &[Triple],
    model: &EmbeddingModel,
    k: usize,
) -> Result<(Graph, Vec<SkippedTriple>), TriframesError> {
    assert!(k >= 1, "k must be >= 1");
    let mut seen = BTreeSet::new();
    let mut embedded: Vec<(String, Vec<f64>)> = Vec::new();
    let mut skipped = Vec::new();
    for triple in triples {
        if !seen.insert(triple) {
            continue;
        }
        match embed_triple(model, triple) {
            Ok(vector) => embedded.push((triple.encode(), vector)),
            Err(missing) => skipped.push((triple.clone(), missing)),
        }
    }
    if embedded.len() < 2 {
        return Err(TriframesError::TooFewTriples(embedded.len()));
    }
    // Node ids follow the encoded-label order so the graph does not depend
    // on input order.
    embedded.sort_by(|a, b| a.0.cmp(&b.0));

    let n = embedded.len();
    let norms: Vec<f64> = embedded
        .iter()
        .map(|(_, v)| v.iter().map(|x| x * x).sum::<f64>().sqrt())
        .collect();
    let selections: Vec<Vec<(usize, f64)>> = (0..n)
        .into_par_iter()
        .map_init(
            || Vec::with_capacity(n),
            |candidates: &mut Vec<(usize, f64)>, i| {
                candidates.clear();
                for j in 0..n {
                    if j == i {
                        continue;
                    }
                    let norm = norms[i] * norms[j];
                    let similarity = if norm == 0.0 {
                        0.0
                    } else {
                        dot(&embedded[i].1, &embedded[j].1) / norm
                    };
                    candidates.push((j, similarity));
                }
                // Similarity descending, serialized label ascending: a total
                // order, so the selected set does not depend on pivot choices.
                let by_rank = |a: &(usize, f64), b: &(usize, f64)| {
                    b.1.partial_cmp(&a.1)
                        .expect("finite similarity")
                        .then_with(|| embedded[a.0].0.cmp(&embedded[b.0].0))
                };
                if k < candidates.len() {
                    candidates.select_nth_unstable_by(k - 1, by_rank);
                    candidates.truncate(k);
                }
                candidates.sort_by(by_rank);
                candidates.clone()
            },
        )
        .collect();

    let mut edges: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for (i, neighbors) in selections.iter().enumerate() {
        for &(j, similarity) in neighbors {
            if similarity > 0.0 {
                edges.insert((i.min(j), i.max(j)), similarity);
            }
        }
    }

    let mut builder = Graph::builder();
    for (label, _) in &embedded {
        builder = builder.node(label);
    }
    for (&(i, j), &w) in &edges {
        builder = builder.weighted_edge(&embedded[i].0, &embedded[j].0, w);
    }
    Ok((builder.build(), skipped))
}

/// Aggregates each cluster of serialized triples into a triframe.
pub fn aggregate_frames(clustering: &Clustering) -> Result<Vec<Triframe>, TriframesError> {
    clustering
        .clusters()
        .iter()
        .map(|members| {
            let mut frame = Triframe {
                subjects: BTreeSet::new(),
                verbs: BTreeSet::new(),
                objects: BTreeSet::new(),
            };
            for member in members {
                let triple = Triple::decode(member)?;
                frame.subjects.insert(triple.subject);
                frame.verbs.insert(triple.verb);
                frame.objects.insert(triple.object);
            }
            Ok(frame)
        })
        .collect()
}

/// A triple the pipeline dropped, with the word missing from the model.
pub type SkippedTriple = (Triple, String);

/// The full pipeline: embed, build the k-NN graph, cluster, aggregate.
/// Returns the frames (one per cluster) and the skipped triples.
pub fn triframes(
    triples: &[Triple],
    model: &EmbeddingModel,
    spec: &TriframesSpec,
) -> Result<(Vec<Triframe>, Vec<SkippedTriple>), TriframesError> {
    if triples.is_empty() {
        return Ok((Vec::new(), Vec::new()));
    }
    let (graph, skipped) = knn_triple_graph(triples, model, spec.k)?;
    let clustering = match &spec.clusterer {
        FrameClusterer::Watset(watset_spec) => watset(&graph, watset_spec),
        FrameClusterer::Hard(clusterer_spec) => clusterers::cluster(&graph, clusterer_spec),
    };
    let frames = aggregate_frames(&clustering)?;
    Ok((frames, skipped))
}

/// Reads the triple TSV format: `subject<TAB>verb<TAB>object`, with an
/// optional count column that is parsed and ignored for graph construction.
pub fn read_triples_tsv(reader: impl BufRead) -> Result<Vec<Triple>, TriframesError> {
    let mut triples = Vec::new();
    for (number, line) in reader.lines().enumerate() {
        let line = line?;
        let number = number + 1;
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() < 3 || fields.len() > 4 {
            return Err(TriframesError::MalformedTriple { line: number });
        }
        if fields.len() == 4 && fields[3].parse::<f64>().is_err() {
            return Err(TriframesError::MalformedTriple { line: number });
        }
        let triple = Triple::new(fields[0], fields[1], fields[2])
            .map_err(|_| TriframesError::MalformedTriple { line: number })?;
        triples.push(triple);
    }
    Ok(triples)
}
