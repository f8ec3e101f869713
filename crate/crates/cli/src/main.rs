//! `skyline` command-line tool.
//!
//! Exit codes: 0 on success, 1 for invalid arguments or configurations,
//! 2 when a run fails (unreadable input, I/O errors).

mod args;
mod bench;

use std::fs::File;
use std::io::{self, Write};
use std::path::Path;
use std::process::ExitCode;

use anyhow::Context;
use clap::Parser;
use skyline::{
    generate, ingest_csv, run, skyline_bruteforce, write_csv, Dataset, EngineConfig, FilterMode, GenSpec,
    PartitionConfig, Preset, RunReport, SkylineSet,
};

use args::{Cli, Command, Format, GenerateArgs, InputArgs, RunArgs};

enum Failure {
    Usage(String),
    Runtime(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        match e.downcast_ref::<skyline::Error>() {
            Some(skyline::Error::Config(_) | skyline::Error::TooFewDimensions { .. }) => Self::Usage(format!("{e:#}")),
            _ => Self::Runtime(e),
        }
    }
}

impl From<skyline::Error> for Failure {
    fn from(e: skyline::Error) -> Self {
        anyhow::Error::from(e).into()
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Self::Runtime(e.into())
    }
}

fn open_out(out: Option<&Path>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(File::create(path).with_context(|| format!("cannot create {}", path.display()))?),
        None => Box::new(io::stdout().lock()),
    })
}

fn load(input: &InputArgs, seed: u64) -> Result<Dataset, Failure> {
    if let Some(path) = &input.input {
        let columns: Vec<(&str, _)> = input.columns.iter().map(|c| (c.name.as_str(), c.direction)).collect();
        return Ok(ingest_csv(path, &columns)?);
    }
    let g = input.gen.expect("clap requires --input or --gen");
    Ok(generate(&GenSpec::new(g.distribution, g.n, g.d, seed))?)
}

fn engine_config(a: &RunArgs) -> EngineConfig {
    let preset = a.preset.unwrap_or(Preset::Sliced);
    let mut config = preset.config(a.partitions);
    if let FilterMode::Representative { q, .. } = &mut config.filter {
        *q = a.reps_q;
    }
    if let Some(strategy) = a.strategy {
        config.partition = PartitionConfig::new(strategy, a.partitions);
    }
    if let Some(filter) = a.filter {
        config.filter = filter.with_q(a.reps_q);
    }
    if let Some(merge) = a.merge {
        config.merge = merge;
    }
    if let Some(m) = a.slices {
        config.partition = config.partition.with_slices(m);
    }
    config.partition = config.partition.with_slice_dim(a.slice_dim);
    if let Some(w) = a.workers {
        config = config.with_workers(w);
    }
    config.with_seed(a.seed)
}

fn write_skyline_csv(sky: &SkylineSet, d: usize, out: impl Write) -> io::Result<()> {
    let mut out = io::BufWriter::new(out);
    let header: Vec<String> = std::iter::once("id".to_string())
        .chain((0..d).map(|j| format!("d{j}")))
        .collect();
    writeln!(out, "{}", header.join(","))?;
    for p in sky.points() {
        let fields: Vec<String> = std::iter::once(p.id().to_string())
            .chain(p.coords().iter().map(f64::to_string))
            .collect();
        writeln!(out, "{}", fields.join(","))?;
    }
    out.flush()
}

fn cmd_generate(a: &GenerateArgs) -> Result<(), Failure> {
    let spec = GenSpec::new(a.spec.distribution, a.spec.n, a.spec.d, a.seed);
    let r = generate(&spec)?;
    write_csv(&r, open_out(a.out.as_deref())?)?;
    let summary = format!(
        "N={} d={} seed={} distribution={}",
        r.len(),
        r.dim(),
        a.seed,
        spec.distribution
    );
    if a.out.is_some() {
        println!("{summary}");
    } else {
        eprintln!("{summary}");
    }
    Ok(())
}

fn cmd_run(a: &RunArgs) -> Result<(), Failure> {
    let config = engine_config(a);
    config.validate()?;
    let r = load(&a.input, a.seed)?;
    let result = run(&r, &config)?;
    let oracle_match = a.oracle.then(|| skyline_bruteforce(&r) == result.skyline);
    let mut out = open_out(a.out.as_deref())?;
    match a.format {
        Format::Json => {
            let mut report = RunReport::new(&result);
            if let Some(matched) = oracle_match {
                report = report.with_oracle(matched);
            }
            if a.canonical {
                report = report.canonical();
            }
            writeln!(out, "{}", report.to_json())?;
        }
        Format::Csv => write_skyline_csv(&result.skyline, result.d, &mut out)?,
    }
    out.flush()?;
    if oracle_match == Some(false) {
        return Err(Failure::Runtime(anyhow::anyhow!(
            "skyline differs from the brute-force result"
        )));
    }
    Ok(())
}

fn cmd_bench(a: &args::BenchArgs) -> Result<(), Failure> {
    let (rows, skipped) = bench::run_bench(a, open_out(a.out.as_deref())?)?;
    if skipped > 0 {
        eprintln!("skipped {skipped} invalid combinations");
    }
    if rows == 0 {
        return Err(Failure::Usage("the sweep contains no valid configuration".into()));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let outcome = match &cli.command {
        Command::Generate(a) => cmd_generate(a),
        Command::Run(a) => cmd_run(a),
        Command::Bench(a) => cmd_bench(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
