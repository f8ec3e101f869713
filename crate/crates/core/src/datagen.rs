//! Synthetic datasets, min-max normalization and CSV input/output.
//!
//! CSV files are comma separated with a header row. Generated datasets are
//! written with the header `d0,d1,...`.

use std::fmt;
use std::fs::File;
use std::io::{self, Write};
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dominance::{Dataset, Point};
use crate::error::{Error, Result};

/// Standard deviation of the noise used by the correlated and anticorrelated generators.
pub const NOISE_SIGMA: f64 = 0.05;

/// Rows generated from one derived random stream.
const SHARD_ROWS: usize = 1 << 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Distribution {
    Uniform,
    Correlated,
    Anticorrelated,
}

impl Distribution {
    pub const ALL: [Distribution; 3] = [Self::Uniform, Self::Correlated, Self::Anticorrelated];

    pub fn name(self) -> &'static str {
        match self {
            Self::Uniform => "UNIFORM",
            Self::Correlated => "CORRELATED",
            Self::Anticorrelated => "ANTICORRELATED",
        }
    }
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Distribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "uniform" | "uni" | "ind" => Ok(Self::Uniform),
            "correlated" | "corr" | "cor" => Ok(Self::Correlated),
            "anticorrelated" | "anti" | "ant" => Ok(Self::Anticorrelated),
            other => Err(Error::Config(format!("unknown distribution `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GenSpec {
    pub distribution: Distribution,
    pub n: usize,
    pub d: usize,
    pub seed: u64,
}

impl GenSpec {
    pub fn new(distribution: Distribution, n: usize, d: usize, seed: u64) -> Self {
        Self {
            distribution,
            n,
            d,
            seed,
        }
    }
}

/// Draws from `N(mean, sigma)` until the value falls in `[0, 1]`.
fn truncated(rng: &mut ChaCha8Rng, noise: &Normal<f64>, mean: f64) -> f64 {
    loop {
        let v = mean + noise.sample(rng);
        if (0.0..=1.0).contains(&v) {
            return v;
        }
    }
}

fn sample_row(dist: Distribution, d: usize, rng: &mut ChaCha8Rng, noise: &Normal<f64>) -> Vec<f64> {
    match dist {
        Distribution::Uniform => (0..d).map(|_| rng.random::<f64>()).collect(),
        Distribution::Correlated => {
            let base = rng.random::<f64>();
            (0..d).map(|_| truncated(rng, noise, base)).collect()
        }
        Distribution::Anticorrelated => loop {
            let level = truncated(rng, noise, 0.5);
            let raw: Vec<f64> = (0..d).map(|_| rng.random::<f64>()).collect();
            let mean = raw.iter().sum::<f64>() / d as f64;
            if mean == 0.0 {
                continue;
            }
            let row: Vec<f64> = raw.iter().map(|v| v * level / mean).collect();
            if row.iter().all(|v| *v <= 1.0) {
                break row;
            }
        },
    }
}

/// Generates `spec.n` points in `[0, 1]^d`. Rows are produced in shards,
/// each with its own stream of a generator seeded by `spec.seed`, so the
/// output does not depend on the number of threads.
pub fn generate(spec: &GenSpec) -> Result<Dataset> {
    if spec.d == 0 {
        return Err(Error::TooFewDimensions { required: 1, found: 0 });
    }
    let noise = Normal::new(0.0, NOISE_SIGMA).expect("constant sigma is valid");
    let shards = spec.n.div_ceil(SHARD_ROWS);
    let points: Vec<Point> = (0..shards)
        .into_par_iter()
        .flat_map_iter(|shard| {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            rng.set_stream(shard as u64);
            let start = shard * SHARD_ROWS;
            let end = spec.n.min(start + SHARD_ROWS);
            (start..end)
                .map(|id| Point::from_parts(id, sample_row(spec.distribution, spec.d, &mut rng, &noise)))
                .collect::<Vec<_>>()
        })
        .collect();
    Ok(Dataset::from_parts(spec.d, points, true))
}

/// Rescales each column of `rows` in place to `[0, 1]`; constant columns become 0.
fn normalize_rows(rows: &mut [Vec<f64>], d: usize) {
    for j in 0..d {
        let (lo, hi) = rows.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
            (lo.min(r[j]), hi.max(r[j]))
        });
        let span = hi - lo;
        for r in rows.iter_mut() {
            r[j] = if span > 0.0 { (r[j] - lo) / span } else { 0.0 };
        }
    }
}

/// Per-column min-max rescaling. Ids are kept.
pub fn normalize(r: &Dataset) -> Dataset {
    let mut rows: Vec<Vec<f64>> = r.iter().map(|p| p.coords().to_vec()).collect();
    normalize_rows(&mut rows, r.dim());
    let points = r
        .iter()
        .zip(rows)
        .map(|(p, row)| Point::from_parts(p.id(), row))
        .collect();
    Dataset::from_parts(r.dim(), points, true)
}

/// Whether smaller or larger values of a column are preferred.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Direction {
    #[default]
    Min,
    Max,
}

impl FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "min" => Ok(Self::Min),
            "max" => Ok(Self::Max),
            other => Err(Error::Config(format!(
                "unknown direction `{other}`, expected min or max"
            ))),
        }
    }
}

fn parse_value(field: &str) -> Option<f64> {
    field.trim().parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Reads the selected columns of a CSV file into a normalized dataset.
///
/// Rows with a missing or non-numeric value in any selected column are
/// dropped. `Max` columns are negated before normalization so that smaller
/// is better everywhere. An empty selection reads every column as `Min`.
/// Ids are the 0-based positions of the surviving rows.
pub fn ingest_csv(path: impl AsRef<Path>, columns: &[(&str, Direction)]) -> Result<Dataset> {
    let path = path.as_ref();
    let csv_err = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new().flexible(true).from_reader(file);
    let header = reader.headers().map_err(csv_err)?.clone();
    let selected: Vec<(usize, Direction)> = if columns.is_empty() {
        (0..header.len()).map(|j| (j, Direction::Min)).collect()
    } else {
        columns
            .iter()
            .map(|(name, dir)| {
                header
                    .iter()
                    .position(|h| h.trim() == *name)
                    .map(|j| (j, *dir))
                    .ok_or_else(|| Error::UnknownColumn((*name).to_string()))
            })
            .collect::<Result<_>>()?
    };
    if selected.is_empty() {
        return Err(Error::NoRows {
            path: path.to_path_buf(),
        });
    }

    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(csv_err)?;
        let row: Option<Vec<f64>> = selected
            .iter()
            .map(|&(j, dir)| {
                record.get(j).and_then(parse_value).map(|v| match dir {
                    Direction::Min => v,
                    Direction::Max => -v,
                })
            })
            .collect();
        rows.extend(row);
    }
    if rows.is_empty() {
        return Err(Error::NoRows {
            path: path.to_path_buf(),
        });
    }
    let d = selected.len();
    normalize_rows(&mut rows, d);
    let points = rows
        .into_iter()
        .enumerate()
        .map(|(id, row)| Point::from_parts(id, row))
        .collect();
    Ok(Dataset::from_parts(d, points, true))
}

/// Writes `r` as CSV with header `d0,...,d{d-1}`. Values use the shortest
/// representation that parses back to the same `f64`.
pub fn write_csv<W: Write>(r: &Dataset, out: W) -> io::Result<()> {
    let mut out = io::BufWriter::new(out);
    let header: Vec<String> = (0..r.dim()).map(|j| format!("d{j}")).collect();
    writeln!(out, "{}", header.join(","))?;
    let mut line = String::new();
    for p in r {
        line.clear();
        for (j, v) in p.coords().iter().enumerate() {
            if j > 0 {
                line.push(',');
            }
            line.push_str(&v.to_string());
        }
        writeln!(out, "{line}")?;
    }
    out.flush()
}
