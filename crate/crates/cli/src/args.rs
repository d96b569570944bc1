//! Command-line surface: flags, their defaults, and translation into the
//! library's algorithm specs.

use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use watset::clusterers::{ClustererSpec, CwWeighting};
use watset::watset::{Similarity, Variant, WatsetSpec};

#[derive(Debug, Parser)]
#[command(
    name = "watset",
    version,
    about = "Fuzzy graph clustering, sense graphs, frame induction, and clustering evaluation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

impl Cli {
    pub fn workers(&self) -> usize {
        let requested = match &self.command {
            Command::Cluster(args) => args.common.workers,
            Command::Senses(args) => args.common.workers,
            Command::SenseGraph(args) => args.common.workers,
            Command::Triframes(args) => args.common.workers,
            Command::Eval(args) => args.common.workers,
            Command::Bench(args) => args.common.workers,
        };
        requested.unwrap_or_else(|| {
            std::thread::available_parallelism().map_or(1, |n| n.get())
        })
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Cluster an edge-list graph and write the clustering TSV.
    Cluster(ClusterArgs),
    /// Induce node senses and write their contexts.
    Senses(SensesArgs),
    /// Build the sense graph and write it as an edge-list TSV.
    SenseGraph(SenseGraphArgs),
    /// Induce frames from subject-verb-object triples.
    Triframes(TriframesArgs),
    /// Score a clustering against a gold clustering.
    Eval(EvalArgs),
    /// Time the clustering pipeline over a set of graphs.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Seed for every random choice the command makes.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker pool size (default: all available cores).
    #[arg(long)]
    pub workers: Option<usize>,
    /// Output file (default: stdout).
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AlgorithmArg {
    Cw,
    Mcl,
    Maxmax,
    Watset,
    WatsetSimplified,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum CwWeightingArg {
    Top,
    Lin,
    Log,
}

impl From<CwWeightingArg> for CwWeighting {
    fn from(arg: CwWeightingArg) -> Self {
        match arg {
            CwWeightingArg::Top => CwWeighting::Top,
            CwWeightingArg::Lin => CwWeighting::Lin,
            CwWeightingArg::Log => CwWeighting::Log,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SimilarityArg {
    Cosine,
    Jaccard,
    Dot,
}

impl From<SimilarityArg> for Similarity {
    fn from(arg: SimilarityArg) -> Self {
        match arg {
            SimilarityArg::Cosine => Similarity::Cosine,
            SimilarityArg::Jaccard => Similarity::Jaccard,
            SimilarityArg::Dot => Similarity::Dot,
        }
    }
}

/// Flags shared by every command that configures clustering algorithms.
#[derive(Debug, Args)]
pub struct AlgorithmArgs {
    /// Hard clusterer for the local step: cw, cw-top, cw-lin, cw-log, mcl.
    #[arg(long, default_value = "cw-top")]
    pub local: String,
    /// Hard clusterer for the global step: cw, cw-top, cw-lin, cw-log, mcl.
    #[arg(long, default_value = "cw-top")]
    pub global: String,
    /// Neighbor weighting for a standalone Chinese Whispers run.
    #[arg(long, value_enum, default_value_t = CwWeightingArg::Top)]
    pub cw_weighting: CwWeightingArg,
    /// Inflation exponent for every Markov Clustering instance.
    #[arg(long, default_value_t = 2.0)]
    pub mcl_inflation: f64,
    /// Context similarity measure for the full watset variant.
    #[arg(long, value_enum, default_value_t = SimilarityArg::Cosine)]
    pub similarity: SimilarityArg,
}

impl AlgorithmArgs {
    /// Parses a `--local` / `--global` value into a hard clusterer spec.
    fn hard_clusterer(&self, text: &str, seed: u64) -> Result<ClustererSpec> {
        let mut spec = match text {
            "cw" | "cw-top" => ClustererSpec::chinese_whispers(CwWeighting::Top),
            "cw-lin" => ClustererSpec::chinese_whispers(CwWeighting::Lin),
            "cw-log" => ClustererSpec::chinese_whispers(CwWeighting::Log),
            "mcl" => ClustererSpec::markov_clustering(),
            "maxmax" => bail!("maxmax is fuzzy and cannot drive the watset local/global steps"),
            other => bail!("unknown clusterer {other:?} (expected cw[-top|-lin|-log] or mcl)"),
        };
        spec.mcl_inflation = self.mcl_inflation;
        if spec.mcl_inflation <= 1.0 {
            bail!("--mcl-inflation must be > 1");
        }
        Ok(spec.with_seed(seed))
    }

    pub fn watset_spec(&self, variant: Variant, seed: u64) -> Result<WatsetSpec> {
        Ok(WatsetSpec {
            local: self.hard_clusterer(&self.local, seed)?,
            global: self.hard_clusterer(&self.global, seed)?,
            similarity: self.similarity.into(),
            variant,
        })
    }

    pub fn plain_spec(&self, algorithm: AlgorithmArg, seed: u64) -> Result<ClustererSpec> {
        let mut spec = match algorithm {
            AlgorithmArg::Cw => ClustererSpec::chinese_whispers(self.cw_weighting.into()),
            AlgorithmArg::Mcl => ClustererSpec::markov_clustering(),
            AlgorithmArg::Maxmax => ClustererSpec::maxmax(),
            _ => bail!("not a plain clusterer"),
        };
        spec.mcl_inflation = self.mcl_inflation;
        if spec.mcl_inflation <= 1.0 {
            bail!("--mcl-inflation must be > 1");
        }
        Ok(spec.with_seed(seed))
    }

    pub fn local_spec(&self, seed: u64) -> Result<ClustererSpec> {
        self.hard_clusterer(&self.local, seed)
    }
}

/// Maps the algorithm flag onto either a watset variant or a plain
/// clusterer.
pub fn variant_of(algorithm: AlgorithmArg) -> Option<Variant> {
    match algorithm {
        AlgorithmArg::Watset => Some(Variant::Full),
        AlgorithmArg::WatsetSimplified => Some(Variant::Simplified),
        _ => None,
    }
}

#[derive(Debug, Args)]
pub struct ClusterArgs {
    /// Edge-list TSV input.
    pub input: PathBuf,
    /// cw, mcl, maxmax, watset, or watset-simplified.
    #[arg(long, value_enum)]
    pub algorithm: AlgorithmArg,
    #[command(flatten)]
    pub algo: AlgorithmArgs,
    /// Drop clusters with at least this many members (must be >= 2).
    #[arg(long)]
    pub prune_max_cluster: Option<usize>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct SensesArgs {
    /// Edge-list TSV input.
    pub input: PathBuf,
    #[command(flatten)]
    pub algo: AlgorithmArgs,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct SenseGraphArgs {
    /// Edge-list TSV input.
    pub input: PathBuf,
    /// watset (full, similarity-disambiguated) or watset-simplified.
    #[arg(long, value_enum, default_value_t = AlgorithmArg::WatsetSimplified)]
    pub algorithm: AlgorithmArg,
    #[command(flatten)]
    pub algo: AlgorithmArgs,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct TriframesArgs {
    /// Triple TSV input: `subject<TAB>verb<TAB>object[<TAB>count]`.
    pub input: PathBuf,
    /// Word embeddings in the word2vec text format.
    #[arg(long)]
    pub embeddings: PathBuf,
    /// Nearest neighbors per triple.
    #[arg(short, long, default_value_t = 30)]
    pub k: usize,
    /// cw, mcl, maxmax, watset, or watset-simplified.
    #[arg(long, value_enum, default_value_t = AlgorithmArg::WatsetSimplified)]
    pub algorithm: AlgorithmArg,
    #[command(flatten)]
    pub algo: AlgorithmArgs,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MeasureArg {
    Pairwise,
    Purity,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Clustering TSV produced by this tool.
    pub system: PathBuf,
    /// Gold clustering TSV.
    #[arg(long)]
    pub gold: PathBuf,
    #[arg(long, value_enum, default_value_t = MeasureArg::Pairwise)]
    pub measure: MeasureArg,
    /// Bootstrap rounds for the F1 distribution.
    #[arg(long)]
    pub bootstrap: Option<usize>,
    /// Write the full bootstrap samples to this JSON file.
    #[arg(long)]
    pub json: Option<PathBuf>,
    /// Score the full vocabularies instead of their intersection.
    #[arg(long)]
    pub no_intersect: bool,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Edge-list TSV inputs, one per measured graph.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    /// Timed runs per graph and mode.
    #[arg(long, default_value_t = 2)]
    pub runs: usize,
    /// Discarded warm-up runs per graph and mode.
    #[arg(long, default_value_t = 3)]
    pub warmup: usize,
    /// watset or watset-simplified.
    #[arg(long, value_enum, default_value_t = AlgorithmArg::Watset)]
    pub algorithm: AlgorithmArg,
    #[command(flatten)]
    pub algo: AlgorithmArgs,
    #[command(flatten)]
    pub common: CommonArgs,
}
