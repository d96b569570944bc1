//! Clustering quality measures and statistical testing.
//!
//! Pairwise scores compare the sets of within-cluster unordered pairs of a
//! system clustering and a gold clustering. Normalized modified purity and
//! normalized inverse purity handle overlapping clusterings; modified purity
//! counts singleton clusters as wrong. Bootstrap resampling produces an
//! F1 distribution for significance testing with Welch's t-test.

use std::collections::HashMap;

use rayon::prelude::*;
use thiserror::Error;

use crate::clustering::Clustering;
use crate::rng::{stream_seed, SplitMix64};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("welch t-test needs at least two observations per sample (got {0} and {1})")]
    TooFewSamples(usize, usize),
}

/// Deduplicated unordered within-cluster pairs of a clustering.
///
/// Labels are interned; a pair is stored once as ascending interned ids.
#[derive(Debug, Clone)]
pub struct PairSet {
    pub vocabulary: Vec<String>,
    pairs: Vec<(u32, u32)>,
}

impl PairSet {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, a: &str, b: &str) -> bool {
        let id = |label: &str| {
            self.vocabulary
                .iter()
                .position(|l| l == label)
                .map(|i| i as u32)
        };
        match (id(a), id(b)) {
            (Some(x), Some(y)) => self.pairs.binary_search(&(x.min(y), x.max(y))).is_ok(),
            _ => false,
        }
    }
}

/// Interns labels so pair sets from two clusterings share one id space.
#[derive(Default)]
struct Interner {
    ids: HashMap<String, u32>,
    labels: Vec<String>,
}

impl Interner {
    fn intern(&mut self, label: &str) -> u32 {
        if let Some(&id) = self.ids.get(label) {
            return id;
        }
        let id = self.labels.len() as u32;
        self.labels.push(label.to_owned());
        self.ids.insert(label.to_owned(), id);
        id
    }
}

fn intern_clustering(clustering: &Clustering, interner: &mut Interner) -> Vec<Vec<u32>> {
    clustering
        .clusters()
        .iter()
        .map(|members| {
            let mut ids: Vec<u32> = members.iter().map(|m| interner.intern(m)).collect();
            ids.sort_unstable();
            ids
        })
        .collect()
}

fn pairs_from_ids<C: AsRef<[u32]>>(clusters: &[C]) -> Vec<(u32, u32)> {
    let mut pairs = Vec::new();
    for members in clusters {
        let ids = members.as_ref();
        for (i, &a) in ids.iter().enumerate() {
            for &b in &ids[i + 1..] {
                pairs.push((a.min(b), a.max(b)));
            }
        }
    }
    pairs.sort_unstable();
    pairs.dedup();
    pairs
}

fn pairs_of(clustering: &Clustering, interner: &mut Interner) -> Vec<(u32, u32)> {
    pairs_from_ids(&intern_clustering(clustering, interner))
}

/// All 2-combinations of cluster members, deduplicated across clusters.
/// Singleton clusters contribute nothing.
pub fn to_pairs(clustering: &Clustering) -> PairSet {
    let mut interner = Interner::default();
    let pairs = pairs_of(clustering, &mut interner);
    PairSet {
        vocabulary: interner.labels,
        pairs,
    }
}

/// Pairwise precision, recall, and F1 with their counts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairwiseScores {
    pub true_positives: usize,
    pub false_positives: usize,
    pub false_negatives: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

fn safe_ratio(numerator: usize, denominator: usize) -> f64 {
    if denominator == 0 {
        0.0
    } else {
        numerator as f64 / denominator as f64
    }
}

fn harmonic_mean(a: f64, b: f64) -> f64 {
    if a + b == 0.0 {
        0.0
    } else {
        2.0 * a * b / (a + b)
    }
}

fn paired_scores_from_pairs(system_pairs: &[(u32, u32)], gold_pairs: &[(u32, u32)]) -> PairwiseScores {
    let mut tp = 0;
    let (mut i, mut j) = (0, 0);
    while i < system_pairs.len() && j < gold_pairs.len() {
        match system_pairs[i].cmp(&gold_pairs[j]) {
            std::cmp::Ordering::Equal => {
                tp += 1;
                i += 1;
                j += 1;
            }
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
        }
    }
    let fp = system_pairs.len() - tp;
    let fn_count = gold_pairs.len() - tp;
    let precision = safe_ratio(tp, tp + fp);
    let recall = safe_ratio(tp, tp + fn_count);
    PairwiseScores {
        true_positives: tp,
        false_positives: fp,
        false_negatives: fn_count,
        precision,
        recall,
        f1: harmonic_mean(precision, recall),
    }
}

/// Paired F-score: precision and recall of the system's within-cluster pair
/// set against the gold one (true positives are the pairs both share).
pub fn paired_prf(system: &Clustering, gold: &Clustering) -> PairwiseScores {
    let mut interner = Interner::default();
    let system_pairs = pairs_of(system, &mut interner);
    let gold_pairs = pairs_of(gold, &mut interner);
    paired_scores_from_pairs(&system_pairs, &gold_pairs)
}

/// Normalized modified purity, normalized inverse purity, and their
/// harmonic mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PurityScores {
    pub nmpu: f64,
    pub nipu: f64,
    pub f1: f64,
}

/// Per-(cluster, node) weight used by the purity measures; defaults to 1.
pub type ClusterNodeWeight<'a> = &'a dyn Fn(usize, &str) -> f64;

/// Gold-side structures shared by every bootstrap round. Interned ids are
/// dense, so node-to-gold-clusters membership is a plain vector.
struct GoldIndex {
    clusters: Vec<Vec<u32>>,
    membership: Vec<Vec<u32>>,
}

impl GoldIndex {
    fn new(gold: &[Vec<u32>], vocabulary: usize) -> Self {
        let mut membership: Vec<Vec<u32>> = vec![Vec::new(); vocabulary];
        for (j, members) in gold.iter().enumerate() {
            for &id in members {
                membership[id as usize].push(j as u32);
            }
        }
        Self {
            clusters: gold.to_vec(),
            membership,
        }
    }
}

/// Single pass over the system clusters computes both purity directions:
/// nmPU takes the best overlap per non-singleton system cluster, niPU the
/// best per gold cluster. `weight_of(i, id)` weighs node `id` inside system
/// cluster `i`. Overlaps accumulate in dense per-gold-cluster arrays reset
/// through a touched list.
fn purity_from_ids<C: AsRef<[u32]>>(
    system: &[C],
    gold: &GoldIndex,
    weight_of: &dyn Fn(usize, u32) -> f64,
) -> PurityScores {
    if system.is_empty() || gold.clusters.is_empty() {
        return PurityScores {
            nmpu: 0.0,
            nipu: 0.0,
            f1: 0.0,
        };
    }
    let mut nmpu_sum = 0.0;
    let mut best_per_gold = vec![0.0f64; gold.clusters.len()];
    let mut overlap_weight = vec![0.0f64; gold.clusters.len()];
    let mut overlap_count = vec![0usize; gold.clusters.len()];
    let mut touched: Vec<u32> = Vec::new();
    for (i, members) in system.iter().enumerate() {
        let members = members.as_ref();
        let mut total = 0.0;
        for &id in members {
            let weight = weight_of(i, id);
            total += weight;
            if let Some(gold_clusters) = gold.membership.get(id as usize) {
                for &j in gold_clusters {
                    let j = j as usize;
                    if overlap_count[j] == 0 {
                        touched.push(j as u32);
                    }
                    overlap_count[j] += 1;
                    overlap_weight[j] += weight;
                }
            }
        }
        let count_both = members.len() > 1 && total > 0.0;
        let mut best = 0.0f64;
        for &j in &touched {
            let j = j as usize;
            if count_both && overlap_weight[j] > best {
                best = overlap_weight[j];
            }
            let share = overlap_count[j] as f64 / gold.clusters[j].len() as f64;
            if share > best_per_gold[j] {
                best_per_gold[j] = share;
            }
            overlap_count[j] = 0;
            overlap_weight[j] = 0.0;
        }
        touched.clear();
        if count_both {
            nmpu_sum += best / total;
        }
    }
    let nmpu = nmpu_sum / system.len() as f64;
    let nipu = best_per_gold.iter().sum::<f64>() / gold.clusters.len() as f64;
    PurityScores {
        nmpu,
        nipu,
        f1: harmonic_mean(nmpu, nipu),
    }
}

/// Purity of overlapping clusterings.
///
/// `nmpu` averages, over system clusters of size > 1, the best normalized
/// weighted overlap with any gold cluster; singleton system clusters count
/// as wrong. `nipu` is the symmetric average over gold clusters without the
/// singleton exclusion. The optional weights apply to the system clusters
/// (gold members weigh 1); with unit weights the overlap of a cluster
/// reduces to `|overlap| / |cluster|`.
pub fn purity_scores(
    system: &Clustering,
    gold: &Clustering,
    weights: Option<ClusterNodeWeight<'_>>,
) -> PurityScores {
    let mut interner = Interner::default();
    let system_ids = intern_clustering(system, &mut interner);
    let gold_ids = intern_clustering(gold, &mut interner);
    let gold_index = GoldIndex::new(&gold_ids, interner.labels.len());
    let labels = &interner.labels;
    let weight_of = move |i: usize, id: u32| -> f64 {
        weights.map_or(1.0, |w| w(i, &labels[id as usize]))
    };
    purity_from_ids(&system_ids, &gold_index, &weight_of)
}

/// Role of a word inside a frame, for role-typed evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Subject,
    Verb,
    Object,
}

impl Role {
    fn tag(self) -> &'static str {
        match self {
            Role::Subject => "subject",
            Role::Verb => "verb",
            Role::Object => "object",
        }
    }
}

/// Label of a role-typed element: the same word in two roles is two
/// distinct elements.
pub fn typed_role_label(word: &str, role: Role) -> String {
    format!("{word}\u{1f}{}", role.tag())
}

/// Converts frames into a clustering over role-typed elements, enabling the
/// purity measures over frames.
pub fn pairs_for_typed_roles(frames: &[crate::triframes::Triframe]) -> Clustering {
    let clusters: Vec<Vec<String>> = frames
        .iter()
        .map(|frame| {
            let mut members = Vec::new();
            members.extend(frame.subjects.iter().map(|w| typed_role_label(w, Role::Subject)));
            members.extend(frame.verbs.iter().map(|w| typed_role_label(w, Role::Verb)));
            members.extend(frame.objects.iter().map(|w| typed_role_label(w, Role::Object)));
            members
        })
        .collect();
    Clustering::from_label_clusters(clusters)
}

/// Measure bootstrapped by [`bootstrap_f1`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BootstrapMeasure {
    Pairwise,
    Purity,
}

/// Bootstrap distribution of F1 scores.
#[derive(Debug, Clone)]
pub struct BootstrapReport {
    pub n_samples: usize,
    pub mean_f1: f64,
    pub std_f1: f64,
    pub samples: Vec<f64>,
}

/// Resamples the system clustering with replacement `n` times and scores
/// each sample against the gold clustering.
///
/// Rounds draw from RNG streams derived from `(seed, round)`, so the report
/// is identical however the rounds are scheduled. Labels are interned once;
/// the rounds work on integer ids.
pub fn bootstrap_f1(
    system: &Clustering,
    gold: &Clustering,
    n: usize,
    seed: u64,
    measure: BootstrapMeasure,
) -> BootstrapReport {
    assert!(n >= 1, "bootstrap needs at least one round");
    let mut interner = Interner::default();
    let system_ids = intern_clustering(system, &mut interner);
    let gold_ids = intern_clustering(gold, &mut interner);
    let gold_index = GoldIndex::new(&gold_ids, interner.labels.len());
    let gold_pairs = pairs_from_ids(&gold_ids);
    let unit = |_: usize, _: u32| 1.0;

    let samples: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|round| {
            let mut rng = SplitMix64::new(stream_seed(seed, round as u64));
            let resampled: Vec<&[u32]> = if system_ids.is_empty() {
                Vec::new()
            } else {
                (0..system_ids.len())
                    .map(|_| system_ids[rng.index(system_ids.len())].as_slice())
                    .collect()
            };
            match measure {
                BootstrapMeasure::Pairwise => {
                    let pairs = pairs_from_ids(&resampled);
                    paired_scores_from_pairs(&pairs, &gold_pairs).f1
                }
                BootstrapMeasure::Purity => purity_from_ids(&resampled, &gold_index, &unit).f1,
            }
        })
        .collect();

    let mean = samples.iter().sum::<f64>() / n as f64;
    let std = if n < 2 {
        0.0
    } else {
        let ss: f64 = samples.iter().map(|s| (s - mean) * (s - mean)).sum();
        (ss / (n - 1) as f64).sqrt()
    };
    BootstrapReport {
        n_samples: n,
        mean_f1: mean,
        std_f1: std,
        samples,
    }
}

/// Welch's unequal-variance t-test; returns the t statistic and two-tailed
/// p-value via the Welch-Satterthwaite degrees of freedom.
///
/// When both samples have zero variance the test degenerates: equal means
/// give p = 1, different means give p = 0.
pub fn welch_t_test(a: &[f64], b: &[f64]) -> Result<(f64, f64), EvalError> {
    if a.len() < 2 || b.len() < 2 {
        return Err(EvalError::TooFewSamples(a.len(), b.len()));
    }
    let mean = |xs: &[f64]| xs.iter().sum::<f64>() / xs.len() as f64;
    let variance = |xs: &[f64], m: f64| {
        xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64
    };
    let (ma, mb) = (mean(a), mean(b));
    let (va, vb) = (variance(a, ma), variance(b, mb));
    let (na, nb) = (a.len() as f64, b.len() as f64);

    let pooled = va / na + vb / nb;
    if pooled == 0.0 {
        return Ok(if ma == mb {
            (0.0, 1.0)
        } else {
            (f64::INFINITY * (ma - mb).signum(), 0.0)
        });
    }

    let t = (ma - mb) / pooled.sqrt();
    let df = pooled * pooled
        / ((va / na) * (va / na) / (na - 1.0) + (vb / nb) * (vb / nb) / (nb - 1.0));
    let x = df / (df + t * t);
    let p = regularized_incomplete_beta(df / 2.0, 0.5, x);
    Ok((t, p.clamp(0.0, 1.0)))
}

/// Regularized incomplete beta function `I_x(a, b)` evaluated by Lentz's
/// continued fraction to 1e-12 relative tolerance.
pub fn regularized_incomplete_beta(a: f64, b: f64, x: f64) -> f64 {
    assert!(a > 0.0 && b > 0.0, "shape parameters must be positive");
    assert!((0.0..=1.0).contains(&x), "x must lie in [0, 1]");
    if x == 0.0 {
        return 0.0;
    }
    if x == 1.0 {
        return 1.0;
    }
    let ln_front = a * x.ln() + b * (1.0 - x).ln() + ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b);
    // The continued fraction converges fast for x < (a+1)/(a+b+2); use the
    // symmetry I_x(a,b) = 1 - I_{1-x}(b,a) otherwise.
    if x < (a + 1.0) / (a + b + 2.0) {
        ln_front.exp() * beta_continued_fraction(a, b, x) / a
    } else {
        1.0 - ln_front.exp() * beta_continued_fraction(b, a, 1.0 - x) / b
    }
}

fn beta_continued_fraction(a: f64, b: f64, x: f64) -> f64 {
    const TOLERANCE: f64 = 1e-12;
    const TINY: f64 = 1e-300;
    const MAX_ITERATIONS: usize = 500;

    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=MAX_ITERATIONS {
        let m = m as f64;
        let m2 = 2.0 * m;

        let numerator = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + numerator * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + numerator / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;

        let numerator = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + numerator * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + numerator / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < TOLERANCE {
            break;
        }
    }
    h
}

/// Lanczos approximation of `ln Γ(x)` for x > 0.
#[allow(clippy::excessive_precision)]
fn ln_gamma(x: f64) -> f64 {
    const COEFFICIENTS: [f64; 9] = [
        0.999_999_999_999_809_93,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_13,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_571_6e-6,
        1.505_632_735_149_311_6e-7,
    ];
    const G: f64 = 7.0;
    if x < 0.5 {
        // Reflection formula.
        return std::f64::consts::PI.ln()
            - (std::f64::consts::PI * x).sin().ln()
            - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut sum = COEFFICIENTS[0];
    for (i, &coefficient) in COEFFICIENTS.iter().enumerate().skip(1) {
        sum += coefficient / (x + i as f64);
    }
    let t = x + G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + sum.ln()
}
