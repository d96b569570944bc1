//! Implementations of the batch subcommands.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use watset::clusterers;
use watset::clustering::Clustering;
use watset::eval::{
    bootstrap_f1, paired_prf, purity_scores, BootstrapMeasure, BootstrapReport,
};
use watset::graph::Graph;
use watset::triframes::{read_triples_tsv, triframes, EmbeddingModel, FrameClusterer, TriframesSpec};
use watset::watset::{build_sense_graph, induce_senses, watset};

use crate::args::{
    variant_of, ClusterArgs, EvalArgs, MeasureArg, SenseGraphArgs, SensesArgs,
    TriframesArgs,
};

pub fn read_graph(path: &Path) -> Result<Graph> {
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    Graph::read_tsv(BufReader::new(file))
        .with_context(|| format!("cannot parse {}", path.display()))
}

fn read_clustering(path: &Path) -> Result<Clustering> {
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    Clustering::read_tsv(BufReader::new(file))
        .with_context(|| format!("cannot parse {}", path.display()))
}

/// Writes through a buffered file or stdout; contents are built fully
/// before writing so outputs are atomic at line granularity.
fn with_output(path: Option<&Path>, write: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> Result<()> {
    match path {
        Some(path) => {
            let file = File::create(path)
                .with_context(|| format!("cannot create {}", path.display()))?;
            let mut writer = BufWriter::new(file);
            write(&mut writer)?;
            writer.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut writer = BufWriter::new(stdout.lock());
            write(&mut writer)?;
            writer.flush()?;
        }
    }
    Ok(())
}

pub fn run_cluster(args: &ClusterArgs) -> Result<()> {
    if let Some(threshold) = args.prune_max_cluster {
        if threshold < 2 {
            bail!("--prune-max-cluster must be >= 2");
        }
    }
    let graph = read_graph(&args.input)?;
    let clustering = match variant_of(args.algorithm) {
        Some(variant) => {
            let spec = args.algo.watset_spec(variant, args.common.seed)?;
            watset(&graph, &spec)
        }
        None => {
            let spec = args.algo.plain_spec(args.algorithm, args.common.seed)?;
            clusterers::cluster(&graph, &spec)
        }
    };
    let clustering = match args.prune_max_cluster {
        Some(threshold) => {
            let (kept, pruned) = clustering.prune_max_cluster(threshold);
            eprintln!("pruned {pruned} clusters of size >= {threshold}");
            kept
        }
        None => clustering,
    };
    with_output(args.common.output.as_deref(), |out| clustering.write_tsv(out))
}

pub fn run_senses(args: &SensesArgs) -> Result<()> {
    let graph = read_graph(&args.input)?;
    let local = args.algo.local_spec(args.common.seed)?;
    let inventory = induce_senses(&graph, &local);
    with_output(args.common.output.as_deref(), |out| {
        let mut line = String::new();
        for node in 0..graph.node_count() {
            for sense in inventory.senses(node) {
                line.clear();
                let entries: Vec<String> = inventory
                    .context(sense)
                    .expect("sense from inventory")
                    .iter()
                    .map(|&(v, w)| format!("{}#{w}", escape_hash(graph.label(v))))
                    .collect();
                line.push_str(graph.label(node));
                line.push('\t');
                line.push_str(&sense.index.to_string());
                line.push('\t');
                line.push_str(&entries.join(", "));
                line.push('\n');
                out.write_all(line.as_bytes())?;
            }
        }
        Ok(())
    })
}

fn escape_hash(label: &str) -> String {
    label.replace('#', "##")
}

pub fn run_sense_graph(args: &SenseGraphArgs) -> Result<()> {
    let Some(variant) = variant_of(args.algorithm) else {
        bail!("sense-graph requires --algorithm watset or watset-simplified");
    };
    let graph = read_graph(&args.input)?;
    let spec = args.algo.watset_spec(variant, args.common.seed)?;
    let inventory = induce_senses(&graph, &spec.local);
    let sense_graph = build_sense_graph(&graph, &inventory, &spec);
    with_output(args.common.output.as_deref(), |out| {
        sense_graph.graph().write_tsv(out)
    })
}

pub fn run_triframes(args: &TriframesArgs) -> Result<()> {
    if args.k == 0 {
        bail!("--k must be >= 1");
    }
    let triples = {
        let file = File::open(&args.input)
            .with_context(|| format!("cannot open {}", args.input.display()))?;
        read_triples_tsv(BufReader::new(file))
            .with_context(|| format!("cannot parse {}", args.input.display()))?
    };
    let (model, duplicates) = {
        let file = File::open(&args.embeddings)
            .with_context(|| format!("cannot open {}", args.embeddings.display()))?;
        EmbeddingModel::read_word2vec_text(BufReader::new(file))
            .with_context(|| format!("cannot parse {}", args.embeddings.display()))?
    };
    if duplicates > 0 {
        eprintln!("warning: {duplicates} duplicate embedding rows ignored");
    }

    let clusterer = match variant_of(args.algorithm) {
        Some(variant) => {
            FrameClusterer::Watset(args.algo.watset_spec(variant, args.common.seed)?)
        }
        None => FrameClusterer::Hard(args.algo.plain_spec(args.algorithm, args.common.seed)?),
    };
    let spec = TriframesSpec {
        k: args.k,
        clusterer,
    };
    let (frames, skipped) = triframes(&triples, &model, &spec)?;
    for (triple, missing) in &skipped {
        eprintln!(
            "skipped out-of-vocabulary triple ({}, {}, {}): no vector for {missing:?}",
            triple.subject, triple.verb, triple.object
        );
    }

    with_output(args.common.output.as_deref(), |out| {
        let mut text = String::new();
        for (index, frame) in frames.iter().enumerate() {
            use std::fmt::Write as _;
            writeln!(text, "# {}", index + 1).unwrap();
            writeln!(
                text,
                "Subjects: {}",
                frame.subjects.iter().cloned().collect::<Vec<_>>().join(", ")
            )
            .unwrap();
            writeln!(
                text,
                "Verbs: {}",
                frame.verbs.iter().cloned().collect::<Vec<_>>().join(", ")
            )
            .unwrap();
            writeln!(
                text,
                "Objects: {}",
                frame.objects.iter().cloned().collect::<Vec<_>>().join(", ")
            )
            .unwrap();
            text.push('\n');
        }
        out.write_all(text.as_bytes())
    })
}

pub fn run_eval(args: &EvalArgs) -> Result<()> {
    if let Some(rounds) = args.bootstrap {
        if rounds == 0 {
            bail!("--bootstrap must be >= 1");
        }
    }
    let system = read_clustering(&args.system)?;
    let gold = read_clustering(&args.gold)?;

    let (system, gold) = if args.no_intersect {
        (system, gold)
    } else {
        let system_vocab = system.vocabulary();
        let gold_vocab = gold.vocabulary();
        let shared: std::collections::BTreeSet<&str> = system_vocab
            .intersection(&gold_vocab)
            .copied()
            .collect();
        if shared.is_empty() {
            eprintln!("warning: system and gold vocabularies do not intersect; all scores are 0");
        }
        (system.retain_vocabulary(&shared), gold.retain_vocabulary(&shared))
    };

    let mut rows: Vec<(String, String)> = Vec::new();
    let mut bootstrap_report: Option<BootstrapReport> = None;
    match args.measure {
        MeasureArg::Pairwise => {
            rows.push(("measure".into(), "pairwise".into()));
            let scores = paired_prf(&system, &gold);
            rows.push(("true_positives".into(), scores.true_positives.to_string()));
            rows.push(("false_positives".into(), scores.false_positives.to_string()));
            rows.push(("false_negatives".into(), scores.false_negatives.to_string()));
            rows.push(("precision".into(), scores.precision.to_string()));
            rows.push(("recall".into(), scores.recall.to_string()));
            rows.push(("f1".into(), scores.f1.to_string()));
            if let Some(rounds) = args.bootstrap {
                bootstrap_report = Some(bootstrap_f1(
                    &system,
                    &gold,
                    rounds,
                    args.common.seed,
                    BootstrapMeasure::Pairwise,
                ));
            }
        }
        MeasureArg::Purity => {
            rows.push(("measure".into(), "purity".into()));
            let scores = purity_scores(&system, &gold, None);
            rows.push(("nmpu".into(), scores.nmpu.to_string()));
            rows.push(("nipu".into(), scores.nipu.to_string()));
            rows.push(("f1".into(), scores.f1.to_string()));
            if let Some(rounds) = args.bootstrap {
                bootstrap_report = Some(bootstrap_f1(
                    &system,
                    &gold,
                    rounds,
                    args.common.seed,
                    BootstrapMeasure::Purity,
                ));
            }
        }
    }
    if let Some(report) = &bootstrap_report {
        rows.push(("bootstrap_n".into(), report.n_samples.to_string()));
        rows.push(("bootstrap_mean_f1".into(), report.mean_f1.to_string()));
        rows.push(("bootstrap_std_f1".into(), report.std_f1.to_string()));
    }

    if let (Some(path), Some(report)) = (&args.json, &bootstrap_report) {
        let payload = serde_json::json!({
            "measure": match args.measure {
                MeasureArg::Pairwise => "pairwise",
                MeasureArg::Purity => "purity",
            },
            "seed": args.common.seed,
            "n_samples": report.n_samples,
            "mean_f1": report.mean_f1,
            "std_f1": report.std_f1,
            "samples": report.samples,
        });
        std::fs::write(path, format!("{payload:#}\n"))
            .with_context(|| format!("cannot write {}", path.display()))?;
    }

    with_output(args.common.output.as_deref(), |out| {
        let mut text = String::new();
        for (measure, value) in &rows {
            text.push_str(measure);
            text.push('\t');
            text.push_str(value);
            text.push('\n');
        }
        out.write_all(text.as_bytes())
    })
}
