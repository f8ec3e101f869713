//! Partitioning strategies: Random, Grid, Angular and Sliced.
//!
//! Every strategy maps each point of a dataset to a partition index in
//! `[0, effective_p)`. Index computations for Grid and Angular are pure
//! per-point functions and run as rayon data-parallel maps on whatever pool
//! is current; Random and Sliced need one global pass (shuffle, sort).

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dominance::{Dataset, Point};
use crate::error::{Error, Result};
use crate::filter::OccupancyMap;
use crate::sequential::lex_then_id;

/// Upper bound on `m^d` / `m^(d-1)` partition counts.
pub const MAX_PARTITIONS: usize = 1 << 22;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Strategy {
    Random,
    Grid,
    Angular,
    Sliced,
}

impl Strategy {
    pub const ALL: [Strategy; 4] = [Self::Random, Self::Grid, Self::Angular, Self::Sliced];

    pub fn name(self) -> &'static str {
        match self {
            Self::Random => "RANDOM",
            Self::Grid => "GRID",
            Self::Angular => "ANGULAR",
            Self::Sliced => "SLICED",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "random" => Ok(Self::Random),
            "grid" => Ok(Self::Grid),
            "angular" | "angle" => Ok(Self::Angular),
            "sliced" | "slice" => Ok(Self::Sliced),
            other => Err(Error::Config(format!("unknown partitioning strategy `{other}`"))),
        }
    }
}

/// How a dataset is split. `partitions` is a target for Grid and Angular:
/// unless `slices` pins `m`, the smallest `m` whose power reaches the target
/// is used (see [`snap_slices`]).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionConfig {
    pub strategy: Strategy,
    pub partitions: usize,
    #[serde(default)]
    pub slices: Option<usize>,
    #[serde(default)]
    pub slice_dim: usize,
}

impl PartitionConfig {
    pub fn new(strategy: Strategy, partitions: usize) -> Self {
        Self {
            strategy,
            partitions,
            slices: None,
            slice_dim: 0,
        }
    }

    pub fn with_slices(mut self, m: usize) -> Self {
        self.slices = Some(m);
        self
    }

    pub fn with_slice_dim(mut self, dim: usize) -> Self {
        self.slice_dim = dim;
        self
    }

    /// Exponent `k` such that the strategy produces `m^k` partitions.
    fn grid_exponent(&self, d: usize) -> Result<Option<u32>> {
        match self.strategy {
            Strategy::Grid => Ok(Some(d as u32)),
            Strategy::Angular if d < 2 => Err(Error::TooFewDimensions { required: 2, found: d }),
            Strategy::Angular => Ok(Some(d as u32 - 1)),
            Strategy::Random | Strategy::Sliced => Ok(None),
        }
    }

    /// Slices per dimension for Grid/Angular, `None` for the other strategies.
    pub fn slices_for(&self, d: usize) -> Result<Option<usize>> {
        if self.partitions == 0 {
            return Err(Error::Config("partition count must be at least 1".into()));
        }
        let Some(k) = self.grid_exponent(d)? else {
            return Ok(None);
        };
        let m = match self.slices {
            Some(0) => return Err(Error::Config("slices per dimension must be at least 1".into())),
            Some(m) => m,
            None => snap_slices(self.partitions, k),
        };
        Ok(Some(m))
    }

    /// The number of partitions a run on `d`-dimensional data will actually use.
    pub fn effective_partitions(&self, d: usize) -> Result<usize> {
        match (self.slices_for(d)?, self.grid_exponent(d)?) {
            (Some(m), Some(k)) => grid_size(m, k),
            _ => Ok(self.partitions),
        }
    }
}

fn grid_size(m: usize, k: u32) -> Result<usize> {
    m.checked_pow(k)
        .filter(|p| *p <= MAX_PARTITIONS)
        .ok_or_else(|| Error::Config(format!("{m}^{k} partitions exceeds the limit of {MAX_PARTITIONS}")))
}

/// Smallest `m ≥ 1` with `m^k ≥ target`.
///
/// For `k = 0` there is only one partition whatever `m` is, so 1 is returned.
pub fn snap_slices(target: usize, k: u32) -> usize {
    if k == 0 || target <= 1 {
        return 1;
    }
    let mut m = (target as f64).powf(1.0 / f64::from(k)).floor().max(1.0) as usize;
    while m.checked_pow(k).is_some_and(|v| v < target) {
        m += 1;
    }
    while m > 1 && (m - 1).checked_pow(k).is_none_or(|v| v >= target) {
        m -= 1;
    }
    m
}

/// Zero-based cell coordinates of a grid partition.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GridCoords(Vec<usize>);

impl GridCoords {
    pub fn new(cells: Vec<usize>) -> Self {
        Self(cells)
    }

    /// Decodes a base-`m` partition index; attribute 0 is the least significant digit.
    pub fn from_index(mut index: usize, m: usize, d: usize) -> Self {
        let mut cells = Vec::with_capacity(d);
        for _ in 0..d {
            cells.push(index % m);
            index /= m;
        }
        Self(cells)
    }

    pub fn to_index(&self, m: usize) -> usize {
        self.0.iter().rev().fold(0, |acc, c| acc * m + c)
    }

    pub fn cells(&self) -> &[usize] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// Grid coordinates of `t` with `m` slices per dimension.
    pub fn of_point(t: &Point, m: usize) -> Result<Self> {
        if let Some(value) = t.out_of_unit_range() {
            return Err(Error::NotNormalized { id: t.id(), value });
        }
        Ok(Self(t.coords().iter().map(|v| slice_of(*v, m)).collect()))
    }
}

impl fmt::Display for GridCoords {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// `⌊fraction · m⌋`, clamped to `m - 1` so the closed upper boundary stays in range.
#[inline]
fn slice_of(fraction: f64, m: usize) -> usize {
    ((fraction * m as f64).floor() as usize).min(m - 1)
}

/// Partition index of `t` on an `m^d` grid over the unit cube.
pub fn grid_index(t: &Point, m: usize) -> Result<usize> {
    Ok(GridCoords::of_point(t, m)?.to_index(m))
}

fn check_same_dim(a: &GridCoords, b: &GridCoords) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    Ok(())
}

/// `a` is strictly below `b` on every grid coordinate, so every point of
/// cell `a` dominates every point of cell `b`.
pub fn grid_dominates(a: &GridCoords, b: &GridCoords) -> Result<bool> {
    check_same_dim(a, b)?;
    Ok(a.0.iter().zip(&b.0).all(|(x, y)| x < y))
}

/// `a ≤ b` on every grid coordinate and `a ≠ b`: cell `a` may hold a
/// dominator of some point in cell `b`. Strictly dominating cells are included.
pub fn weak_grid_dominates(a: &GridCoords, b: &GridCoords) -> Result<bool> {
    check_same_dim(a, b)?;
    Ok(a != b && a.0.iter().zip(&b.0).all(|(x, y)| x <= y))
}

/// The `d - 1` angular coordinates of the hyper-spherical transform, each in
/// `[0, π/2]`. `φ_i = atan2(‖x_{i+1..}‖, x_i)`, which yields `π/2` when
/// `x_i = 0` with a positive tail and `0` when both vanish.
pub fn hyperspherical_angles(t: &Point) -> Result<Vec<f64>> {
    let x = t.coords();
    if x.len() < 2 {
        return Err(Error::TooFewDimensions {
            required: 2,
            found: x.len(),
        });
    }
    Ok(angles_of(x))
}

fn angles_of(x: &[f64]) -> Vec<f64> {
    let d = x.len();
    let mut tail_sq = vec![0.0; d];
    for i in (0..d - 1).rev() {
        tail_sq[i] = tail_sq[i + 1] + x[i + 1] * x[i + 1];
    }
    (0..d - 1).map(|i| tail_sq[i].sqrt().atan2(x[i])).collect()
}

/// Partition index of `t` on an `m^(d-1)` grid over angular coordinates.
pub fn angular_index(t: &Point, m: usize) -> Result<usize> {
    let angles = hyperspherical_angles(t)?;
    Ok(angular_index_of(&angles, m))
}

fn angular_index_of(angles: &[f64], m: usize) -> usize {
    angles
        .iter()
        .rev()
        .fold(0, |acc, phi| acc * m + slice_of(2.0 * phi / PI, m))
}

/// Strategy-specific information produced alongside the assignment.
#[derive(Debug, Clone, PartialEq)]
pub enum PartitionMeta {
    Random,
    Grid {
        slices: usize,
        occupancy: OccupancyMap,
    },
    Angular {
        slices: usize,
    },
    /// Dataset positions in slice order. Each partition is a contiguous run of
    /// this order and is therefore internally sorted by a monotone key.
    Sliced {
        order: Vec<usize>,
    },
}

/// Partition index for every point of a dataset, by position.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionAssignment {
    strategy: Strategy,
    dim: usize,
    partitions: usize,
    index_of: Vec<usize>,
    meta: PartitionMeta,
}

impl PartitionAssignment {
    pub fn strategy(&self) -> Strategy {
        self.strategy
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Effective number of partitions, including empty ones.
    pub fn partitions(&self) -> usize {
        self.partitions
    }

    /// Partition index of each point, indexed by its position in the dataset.
    pub fn index_of(&self) -> &[usize] {
        &self.index_of
    }

    pub fn meta(&self) -> &PartitionMeta {
        &self.meta
    }

    /// Whether each partition's points come out already topologically sorted.
    pub fn is_presorted(&self) -> bool {
        matches!(self.meta, PartitionMeta::Sliced { .. })
    }

    pub fn slices(&self) -> Option<usize> {
        match self.meta {
            PartitionMeta::Grid { slices, .. } | PartitionMeta::Angular { slices } => Some(slices),
            _ => None,
        }
    }

    pub fn occupancy(&self) -> Option<&OccupancyMap> {
        match &self.meta {
            PartitionMeta::Grid { occupancy, .. } => Some(occupancy),
            _ => None,
        }
    }

    /// Grid cell of partition `i` (Grid strategy only).
    pub fn cell_of(&self, i: usize) -> Option<GridCoords> {
        match self.meta {
            PartitionMeta::Grid { slices, .. } => Some(GridCoords::from_index(i, slices, self.dim)),
            _ => None,
        }
    }

    /// Dataset positions grouped by partition, in processing order.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut groups = vec![Vec::new(); self.partitions];
        match &self.meta {
            PartitionMeta::Sliced { order } => {
                for &pos in order {
                    groups[self.index_of[pos]].push(pos);
                }
            }
            _ => {
                for (pos, &i) in self.index_of.iter().enumerate() {
                    groups[i].push(pos);
                }
            }
        }
        groups
    }

    pub(crate) fn split<'a>(&self, r: &'a Dataset) -> Vec<Vec<&'a Point>> {
        let points = r.points();
        self.members()
            .into_iter()
            .map(|g| g.into_iter().map(|pos| &points[pos]).collect())
            .collect()
    }

    /// Materializes the partitions as datasets.
    pub fn split_datasets(&self, r: &Dataset) -> Vec<Dataset> {
        self.split(r)
            .into_iter()
            .map(|part| Dataset::from_parts(r.dim(), part.into_iter().cloned().collect(), r.is_normalized()))
            .collect()
    }
}

/// Seeded shuffle followed by round-robin dealing; sizes differ by at most one.
pub fn assign_random(r: &Dataset, p: usize, seed: u64) -> Result<PartitionAssignment> {
    if p == 0 {
        return Err(Error::Config("partition count must be at least 1".into()));
    }
    let mut order: Vec<usize> = (0..r.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut index_of = vec![0; r.len()];
    for (k, pos) in order.into_iter().enumerate() {
        index_of[pos] = k % p;
    }
    Ok(PartitionAssignment {
        strategy: Strategy::Random,
        dim: r.dim(),
        partitions: p,
        index_of,
        meta: PartitionMeta::Random,
    })
}

/// Grid partitioning with `m` slices per dimension. Requires normalized data.
pub fn assign_grid(r: &Dataset, m: usize) -> Result<PartitionAssignment> {
    if m == 0 {
        return Err(Error::Config("slices per dimension must be at least 1".into()));
    }
    let partitions = grid_size(m, r.dim() as u32)?;
    let index_of = r
        .points()
        .par_iter()
        .map(|t| grid_index(t, m))
        .collect::<Result<Vec<_>>>()?;
    let occupancy = OccupancyMap::from_indices(&index_of, m, r.dim());
    Ok(PartitionAssignment {
        strategy: Strategy::Grid,
        dim: r.dim(),
        partitions,
        index_of,
        meta: PartitionMeta::Grid { slices: m, occupancy },
    })
}

/// Angle-based partitioning with `m` slices per angular coordinate.
pub fn assign_angular(r: &Dataset, m: usize) -> Result<PartitionAssignment> {
    if r.dim() < 2 {
        return Err(Error::TooFewDimensions {
            required: 2,
            found: r.dim(),
        });
    }
    if m == 0 {
        return Err(Error::Config("slices per dimension must be at least 1".into()));
    }
    let partitions = grid_size(m, r.dim() as u32 - 1)?;
    let index_of = r
        .points()
        .par_iter()
        .map(|t| angular_index_of(&angles_of(t.coords()), m))
        .collect();
    Ok(PartitionAssignment {
        strategy: Strategy::Angular,
        dim: r.dim(),
        partitions,
        index_of,
        meta: PartitionMeta::Angular { slices: m },
    })
}

/// Sorts by `slice_dim` and cuts the order into `p` contiguous, equally sized runs.
///
/// Ties on `slice_dim` are broken by the full coordinate vector and then by id,
/// which keeps the order a linear extension of dominance.
pub fn assign_sliced(r: &Dataset, p: usize, slice_dim: usize) -> Result<PartitionAssignment> {
    if p == 0 {
        return Err(Error::Config("partition count must be at least 1".into()));
    }
    if slice_dim >= r.dim() {
        return Err(Error::Config(format!(
            "slice dimension {slice_dim} out of range for {}-dimensional data",
            r.dim()
        )));
    }
    let points = r.points();
    let mut order: Vec<usize> = (0..r.len()).collect();
    order.par_sort_unstable_by(|&a, &b| {
        let (pa, pb) = (&points[a], &points[b]);
        pa.coords()[slice_dim]
            .total_cmp(&pb.coords()[slice_dim])
            .then_with(|| lex_then_id(pa, pb))
    });
    let n = order.len();
    let mut index_of = vec![0; n];
    for (rank, &pos) in order.iter().enumerate() {
        index_of[pos] = sliced_index(rank, n, p);
    }
    Ok(PartitionAssignment {
        strategy: Strategy::Sliced,
        dim: r.dim(),
        partitions: p,
        index_of,
        meta: PartitionMeta::Sliced { order },
    })
}

/// `⌊rank · p / (n - 1)⌋` for a 0-based rank, clamped to `p - 1`.
pub fn sliced_index(rank: usize, n: usize, p: usize) -> usize {
    if n <= 1 {
        return 0;
    }
    let i = (rank as u128 * p as u128) / (n as u128 - 1);
    (i as usize).min(p - 1)
}

/// Runs the strategy selected by `config`. `seed` only affects Random.
pub fn assign(r: &Dataset, config: &PartitionConfig, seed: u64) -> Result<PartitionAssignment> {
    match config.strategy {
        Strategy::Random => assign_random(r, config.partitions, seed),
        Strategy::Sliced => assign_sliced(r, config.partitions, config.slice_dim),
        Strategy::Grid => {
            let m = config.slices_for(r.dim())?.unwrap_or(1);
            assign_grid(r, m)
        }
        Strategy::Angular => {
            let m = config.slices_for(r.dim())?.unwrap_or(1);
            assign_angular(r, m)
        }
    }
}
