//! Benchmark sweeps.
//!
//! Every combination of dataset, configuration, partition count and worker
//! count is run `reps` times on the same data. Combinations that do not form
//! a valid configuration (grid filtering without grid partitioning, angular
//! partitioning of one-dimensional data) are skipped and counted on stderr.
//! A run that fails still produces a row, with the message in `error`.

use std::io::Write;

use serde::Serialize;
use skyline::{
    generate, ingest_csv, run, Dataset, EngineConfig, FilterMode, GenSpec, MergeMode, PartitionConfig, Strategy,
};

use crate::args::BenchArgs;

/// One CSV row. Column order is the field order.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct BenchRow {
    pub dataset: String,
    pub n: usize,
    pub d: usize,
    pub seed: u64,
    pub rep: usize,
    pub preset: String,
    pub strategy: String,
    pub partitions: usize,
    pub effective_p: Option<usize>,
    pub filter: String,
    pub selection: String,
    pub reps_q: Option<usize>,
    pub merge: String,
    pub workers: usize,
    pub partition_ms: Option<f64>,
    pub local_ms: Option<f64>,
    pub merge_ms: Option<f64>,
    pub total_ms: Option<f64>,
    pub filtered: Option<usize>,
    pub union_size: Option<usize>,
    pub max_local_size: Option<usize>,
    pub skyline_size: Option<usize>,
    /// Per-partition local skyline sizes joined with `;`.
    pub local_skyline_sizes: String,
    pub error: String,
}

/// A configuration of the sweep before partitions and workers are applied.
#[derive(Debug, Clone, Copy)]
struct Variant {
    preset: Option<skyline::Preset>,
    strategy: Strategy,
    filter: FilterMode,
    merge: MergeMode,
}

fn variants(args: &BenchArgs) -> Vec<Variant> {
    if !args.preset.is_empty() {
        return args
            .preset
            .iter()
            .map(|&p| {
                let filter = match p.filter() {
                    FilterMode::Representative { selection, .. } => FilterMode::Representative {
                        selection,
                        q: args.reps_q,
                    },
                    other => other,
                };
                Variant {
                    preset: Some(p),
                    strategy: p.strategy(),
                    filter,
                    merge: p.merge(),
                }
            })
            .collect();
    }
    let mut out = Vec::new();
    for &strategy in &args.strategy {
        for filter in &args.filter {
            for &merge in &args.merge {
                out.push(Variant {
                    preset: None,
                    strategy,
                    filter: filter.with_q(args.reps_q),
                    merge,
                });
            }
        }
    }
    out
}

struct Input {
    label: String,
    data: Dataset,
}

fn inputs(args: &BenchArgs) -> anyhow::Result<Vec<Input>> {
    if let Some(path) = &args.input {
        let columns: Vec<(&str, _)> = args.columns.iter().map(|c| (c.name.as_str(), c.direction)).collect();
        let data = ingest_csv(path, &columns)?;
        return Ok(vec![Input {
            label: path.display().to_string(),
            data,
        }]);
    }
    let mut out = Vec::new();
    for &distribution in &args.dist {
        for &n in &args.n {
            for &d in &args.d {
                let data = generate(&GenSpec::new(distribution, n, d, args.seed))?;
                out.push(Input {
                    label: distribution.name().to_string(),
                    data,
                });
            }
        }
    }
    Ok(out)
}

fn row(input: &Input, rep: usize, v: &Variant, config: &EngineConfig, canonical: bool) -> BenchRow {
    let (selection, reps_q) = match config.filter {
        FilterMode::Representative { selection, q } => (selection.name().to_string(), Some(q)),
        _ => (String::new(), None),
    };
    let mut row = BenchRow {
        dataset: input.label.clone(),
        n: input.data.len(),
        d: input.data.dim(),
        seed: config.seed,
        rep,
        preset: v.preset.map(|p| p.name().to_string()).unwrap_or_default(),
        strategy: v.strategy.name().to_string(),
        partitions: config.partition.partitions,
        filter: config.filter.name().to_string(),
        selection,
        reps_q,
        merge: config.merge.name().to_string(),
        workers: config.workers,
        ..BenchRow::default()
    };
    match run(&input.data, config) {
        Ok(res) => {
            let m = &res.metrics;
            row.effective_p = Some(res.effective_p);
            if !canonical {
                row.partition_ms = Some(m.partition_ms);
                row.local_ms = Some(m.local_ms);
                row.merge_ms = Some(m.merge_ms);
                row.total_ms = Some(m.partition_ms + m.local_ms + m.merge_ms);
            }
            row.filtered = Some(m.filtered_count);
            row.union_size = Some(m.union_size);
            row.max_local_size = m.local_skyline_sizes.iter().copied().max();
            row.skyline_size = Some(m.final_size);
            row.local_skyline_sizes = m
                .local_skyline_sizes
                .iter()
                .map(usize::to_string)
                .collect::<Vec<_>>()
                .join(";");
        }
        Err(e) => row.error = e.to_string(),
    }
    row
}

/// Runs the sweep, writing rows as they complete. Returns (rows, skipped cells).
pub fn run_bench<W: Write>(args: &BenchArgs, out: W) -> anyhow::Result<(usize, usize)> {
    let workers = if args.workers.is_empty() {
        vec![std::thread::available_parallelism().map_or(1, |n| n.get())]
    } else {
        args.workers.clone()
    };
    let variants = variants(args);
    let mut writer = csv::Writer::from_writer(out);
    let (mut rows, mut skipped) = (0, 0);
    for input in inputs(args)? {
        for v in &variants {
            for &p in &args.partitions {
                for &w in &workers {
                    let config = EngineConfig::new(PartitionConfig::new(v.strategy, p))
                        .with_filter(v.filter)
                        .with_merge(v.merge)
                        .with_workers(w)
                        .with_seed(args.seed);
                    if config.validate().is_err() || config.partition.effective_partitions(input.data.dim()).is_err() {
                        skipped += 1;
                        continue;
                    }
                    for rep in 0..args.reps {
                        writer.serialize(row(&input, rep, v, &config, args.canonical))?;
                        writer.flush()?;
                        rows += 1;
                    }
                }
            }
        }
    }
    writer.flush()?;
    Ok((rows, skipped))
}
