//! Wall-time measurement of the clustering pipeline.
//!
//! For every input graph the configured pipeline runs in two modes,
//! sequential (one worker) and parallel (the requested pool size), with a
//! number of discarded warm-up runs before the timed ones. Both modes must
//! produce identical clusterings; the report carries per-graph rows and the
//! log-log regression slope of sequential time against node count.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use watset::clustering::Clustering;
use watset::graph::Graph;
use watset::watset::{watset, WatsetSpec};

use crate::args::{variant_of, BenchArgs};
use crate::commands::read_graph;

struct Row {
    graph: String,
    nodes: usize,
    edges: usize,
    max_degree: usize,
    workers: usize,
    runs: usize,
    mean_seconds: f64,
    std_seconds: f64,
}

fn timed_runs(
    graph: &Graph,
    spec: &WatsetSpec,
    workers: usize,
    warmup: usize,
    runs: usize,
) -> Result<(Vec<f64>, Clustering)> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .context("cannot build bench pool")?;
    pool.install(|| {
        for _ in 0..warmup {
            let _ = watset(graph, spec);
        }
        let mut times = Vec::with_capacity(runs);
        let mut clustering = None;
        for _ in 0..runs {
            let start = Instant::now();
            let result = watset(graph, spec);
            times.push(start.elapsed().as_secs_f64());
            clustering.get_or_insert(result);
        }
        Ok((times, clustering.expect("at least one run")))
    })
}

fn mean_std(samples: &[f64]) -> (f64, f64) {
    let mean = samples.iter().sum::<f64>() / samples.len() as f64;
    let std = if samples.len() < 2 {
        0.0
    } else {
        let ss: f64 = samples.iter().map(|s| (s - mean) * (s - mean)).sum();
        (ss / (samples.len() - 1) as f64).sqrt()
    };
    (mean, std)
}

/// Least-squares slope of ln(time) on ln(nodes).
fn loglog_slope(points: &[(usize, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let logs: Vec<(f64, f64)> = points
        .iter()
        .filter(|&&(n, t)| n > 0 && t > 0.0)
        .map(|&(n, t)| ((n as f64).ln(), t.ln()))
        .collect();
    if logs.len() < 2 || logs.iter().all(|&(x, _)| x == logs[0].0) {
        return None;
    }
    let n = logs.len() as f64;
    let sum_x: f64 = logs.iter().map(|&(x, _)| x).sum();
    let sum_y: f64 = logs.iter().map(|&(_, y)| y).sum();
    let sum_xx: f64 = logs.iter().map(|&(x, _)| x * x).sum();
    let sum_xy: f64 = logs.iter().map(|&(x, y)| x * y).sum();
    Some((n * sum_xy - sum_x * sum_y) / (n * sum_xx - sum_x * sum_x))
}

pub fn run_bench(args: &BenchArgs, workers: usize) -> Result<()> {
    if args.runs == 0 {
        bail!("--runs must be >= 1");
    }
    let Some(variant) = variant_of(args.algorithm) else {
        bail!("bench requires --algorithm watset or watset-simplified");
    };
    let spec = args.algo.watset_spec(variant, args.common.seed)?;

    let mut rows: Vec<Row> = Vec::new();
    let mut sequential_points: Vec<(usize, f64)> = Vec::new();
    for input in &args.inputs {
        let graph = read_graph(input)?;
        let stats = graph.stats();
        let name = input.display().to_string();

        let (sequential_times, sequential_clusters) =
            timed_runs(&graph, &spec, 1, args.warmup, args.runs)?;
        let (sequential_mean, sequential_std) = mean_std(&sequential_times);
        sequential_points.push((stats.node_count, sequential_mean));
        rows.push(Row {
            graph: name.clone(),
            nodes: stats.node_count,
            edges: stats.edge_count,
            max_degree: stats.max_degree,
            workers: 1,
            runs: args.runs,
            mean_seconds: sequential_mean,
            std_seconds: sequential_std,
        });

        if workers > 1 {
            let (parallel_times, parallel_clusters) =
                timed_runs(&graph, &spec, workers, args.warmup, args.runs)?;
            if parallel_clusters != sequential_clusters {
                bail!(
                    "determinism violation on {name}: sequential and parallel clusterings differ"
                );
            }
            let (parallel_mean, parallel_std) = mean_std(&parallel_times);
            rows.push(Row {
                graph: name,
                nodes: stats.node_count,
                edges: stats.edge_count,
                max_degree: stats.max_degree,
                workers,
                runs: args.runs,
                mean_seconds: parallel_mean,
                std_seconds: parallel_std,
            });
        }
    }

    let slope = loglog_slope(&sequential_points);
    let write = |out: &mut dyn Write| -> io::Result<()> {
        let mut text = String::from(
            "# graph\tnodes\tedges\tmax_degree\tworkers\truns\tmean_s\tstd_s\n",
        );
        for row in &rows {
            use std::fmt::Write as _;
            writeln!(
                text,
                "{}\t{}\t{}\t{}\t{}\t{}\t{:.6}\t{:.6}",
                row.graph,
                row.nodes,
                row.edges,
                row.max_degree,
                row.workers,
                row.runs,
                row.mean_seconds,
                row.std_seconds
            )
            .unwrap();
        }
        if let Some(slope) = slope {
            use std::fmt::Write as _;
            writeln!(text, "loglog_slope_vs_nodes\t{slope:.4}").unwrap();
        }
        out.write_all(text.as_bytes())
    };

    match args.common.output.as_deref() {
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
