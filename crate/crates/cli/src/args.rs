use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use skyline::{
    Direction, Distribution, FilterMode, MergeMode, Preset, Selection, Strategy, DEFAULT_REPS_PER_PARTITION,
};

#[derive(Debug, Parser)]
#[command(
    name = "skyline",
    version,
    about = "Generate datasets and compute skylines in parallel"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a synthetic dataset as CSV.
    Generate(GenerateArgs),
    /// Compute the skyline of one dataset.
    Run(RunArgs),
    /// Sweep a grid of datasets and configurations, one CSV row per run.
    Bench(BenchArgs),
}

/// `dist,N,d`, e.g. `anti,100000,4`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenArg {
    pub distribution: Distribution,
    pub n: usize,
    pub d: usize,
}

impl FromStr for GenArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let [dist, n, d] = parts.as_slice() else {
            return Err(format!("expected dist,N,d but got `{s}`"));
        };
        let distribution = dist.parse().map_err(|e: skyline::Error| e.to_string())?;
        let n = n.parse().map_err(|_| format!("invalid row count `{n}`"))?;
        let d = d.parse().map_err(|_| format!("invalid dimensionality `{d}`"))?;
        if d == 0 {
            return Err("dimensionality must be at least 1".into());
        }
        Ok(Self { distribution, n, d })
    }
}

/// A CSV column to read, optionally suffixed with `:max` or `:min`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnArg {
    pub name: String,
    pub direction: Direction,
}

impl FromStr for ColumnArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (name, direction) = match s.rsplit_once(':') {
            Some((name, dir)) => (name, dir.parse().map_err(|e: skyline::Error| e.to_string())?),
            None => (s, Direction::Min),
        };
        if name.is_empty() {
            return Err("empty column name".into());
        }
        Ok(Self {
            name: name.to_string(),
            direction,
        })
    }
}

/// Filter choice on the command line; the representative count comes from `--reps-q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FilterArg {
    None,
    Grid,
    Representative(Selection),
}

impl FilterArg {
    pub fn with_q(self, q: usize) -> FilterMode {
        match self {
            Self::None => FilterMode::None,
            Self::Grid => FilterMode::Grid,
            Self::Representative(selection) => FilterMode::Representative { selection, q },
        }
    }
}

impl FromStr for FilterArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let lower = s.to_ascii_lowercase();
        let rep = lower
            .strip_prefix("representative-")
            .or_else(|| lower.strip_prefix("rep-"))
            .unwrap_or(&lower);
        match rep {
            "none" => Ok(Self::None),
            "grid" | "grid-filter" => Ok(Self::Grid),
            other => other
                .parse()
                .map(Self::Representative)
                .map_err(|_| format!("unknown filter `{s}`; expected none, grid, sorted, region or random")),
        }
    }
}

fn parse<T: FromStr<Err = skyline::Error>>(s: &str) -> Result<T, String> {
    s.parse().map_err(|e: skyline::Error| e.to_string())
}

pub fn parse_strategy(s: &str) -> Result<Strategy, String> {
    parse(s)
}

pub fn parse_merge(s: &str) -> Result<MergeMode, String> {
    parse(s)
}

pub fn parse_preset(s: &str) -> Result<Preset, String> {
    parse(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Dataset as dist,N,d with dist one of uniform, correlated, anti.
    #[arg(long = "gen", value_name = "DIST,N,D")]
    pub spec: GenArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// CSV file to read; columns are min-max normalized.
    #[arg(long, required_unless_present = "gen", conflicts_with = "gen")]
    pub input: Option<PathBuf>,
    /// Columns of --input to use, comma separated, each optionally `name:max`.
    #[arg(long, value_delimiter = ',', requires = "input")]
    pub columns: Vec<ColumnArg>,
    /// Generate the dataset instead, as dist,N,d.
    #[arg(long = "gen", value_name = "DIST,N,D")]
    pub gen: Option<GenArg>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Seed for generation, random partitioning and random representatives.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Named configuration: random, grid, angular, sliced, sliced+, angular+, noseq.
    #[arg(long, value_parser = parse_preset)]
    pub preset: Option<Preset>,
    /// random, grid, angular or sliced; overrides the preset.
    #[arg(long, value_parser = parse_strategy)]
    pub strategy: Option<Strategy>,
    /// none, grid, sorted, region or random; overrides the preset.
    #[arg(long)]
    pub filter: Option<FilterArg>,
    /// Representatives per partition.
    #[arg(long, default_value_t = DEFAULT_REPS_PER_PARTITION)]
    pub reps_q: usize,
    /// seq or noseq; overrides the preset.
    #[arg(long, value_parser = parse_merge)]
    pub merge: Option<MergeMode>,
    /// Target partition count; grid and angular round up to a power of the slice count.
    #[arg(long, default_value_t = skyline::DEFAULT_PARTITIONS)]
    pub partitions: usize,
    /// Slices per dimension for grid and angular, instead of deriving it from --partitions.
    #[arg(long)]
    pub slices: Option<usize>,
    /// Coordinate used by sliced partitioning.
    #[arg(long, default_value_t = 0)]
    pub slice_dim: usize,
    /// Worker threads; defaults to the number of cores.
    #[arg(long)]
    pub workers: Option<usize>,
    /// Also compute the skyline by brute force and report whether it matches.
    #[arg(long)]
    pub oracle: bool,
    /// Leave out workers and timings so that output is byte-reproducible.
    #[arg(long)]
    pub canonical: bool,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// CSV file to benchmark on instead of generated data.
    #[arg(long, conflicts_with_all = ["dist", "n", "d"])]
    pub input: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', requires = "input")]
    pub columns: Vec<ColumnArg>,
    #[arg(long, value_delimiter = ',', default_value = "anti", value_parser = parse::<Distribution>)]
    pub dist: Vec<Distribution>,
    #[arg(long, value_delimiter = ',', default_value = "100000")]
    pub n: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "4")]
    pub d: Vec<usize>,
    /// Named configurations; combined with the other grids instead of --strategy/--filter/--merge.
    #[arg(long, value_delimiter = ',', value_parser = parse_preset, conflicts_with_all = ["strategy", "filter", "merge"])]
    pub preset: Vec<Preset>,
    #[arg(long, value_delimiter = ',', default_value = "sliced", value_parser = parse_strategy)]
    pub strategy: Vec<Strategy>,
    #[arg(long, value_delimiter = ',', default_value = "none")]
    pub filter: Vec<FilterArg>,
    #[arg(long, value_delimiter = ',', default_value = "seq", value_parser = parse_merge)]
    pub merge: Vec<MergeMode>,
    #[arg(long, value_delimiter = ',', default_value = "120")]
    pub partitions: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    pub workers: Vec<usize>,
    #[arg(long, default_value_t = DEFAULT_REPS_PER_PARTITION)]
    pub reps_q: usize,
    /// Repetitions of every cell.
    #[arg(long, default_value_t = 1)]
    pub reps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Leave timing columns empty so that output is byte-reproducible.
    #[arg(long)]
    pub canonical: bool,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
