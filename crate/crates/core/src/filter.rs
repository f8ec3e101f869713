//! Pruning applied before the local phase: Grid Filtering over occupied cells
//! and Representative Filtering with a broadcast antichain of strong points.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dominance::{is_dominated_by, unit_volume, Dataset, Point};
use crate::error::{Error, Result};
use crate::partition::GridCoords;
use crate::sequential::{lex_then_id, sfs_refs, ScoringFunction};

/// Representatives taken from each partition when none is configured.
pub const DEFAULT_REPS_PER_PARTITION: usize = 5;

/// The set of grid cells holding at least one point.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OccupancyMap {
    slices: usize,
    dim: usize,
    non_empty: BTreeSet<GridCoords>,
}

impl OccupancyMap {
    pub fn new(slices: usize, dim: usize, non_empty: impl IntoIterator<Item = GridCoords>) -> Self {
        Self {
            slices,
            dim,
            non_empty: non_empty.into_iter().collect(),
        }
    }

    pub(crate) fn from_indices(indices: &[usize], slices: usize, dim: usize) -> Self {
        let distinct: BTreeSet<usize> = indices.iter().copied().collect();
        Self::new(
            slices,
            dim,
            distinct.into_iter().map(|i| GridCoords::from_index(i, slices, dim)),
        )
    }

    pub fn slices(&self) -> usize {
        self.slices
    }

    pub fn contains(&self, cell: &GridCoords) -> bool {
        self.non_empty.contains(cell)
    }

    pub fn len(&self) -> usize {
        self.non_empty.len()
    }

    pub fn is_empty(&self) -> bool {
        self.non_empty.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &GridCoords> {
        self.non_empty.iter()
    }
}

/// Non-empty cells that no other non-empty cell grid-dominates.
///
/// A cell `c` is grid-dominated iff some occupied cell lies in the box
/// `[0, c - 1]`. An inclusive prefix-OR over the occupancy grid answers that
/// for every cell in `O(m^d · d)`.
pub fn grid_filter(occupancy: &OccupancyMap) -> BTreeSet<GridCoords> {
    let (m, d) = (occupancy.slices, occupancy.dim);
    if occupancy.is_empty() || m < 2 {
        return occupancy.non_empty.clone();
    }
    let total = m.pow(d as u32);
    let mut below = vec![false; total];
    for cell in &occupancy.non_empty {
        below[cell.to_index(m)] = true;
    }
    let mut stride = 1;
    for _ in 0..d {
        for idx in 0..total {
            if (idx / stride) % m > 0 && below[idx - stride] {
                below[idx] = true;
            }
        }
        stride *= m;
    }
    let all_ones: usize = (0..d).map(|j| m.pow(j as u32)).sum();
    occupancy
        .non_empty
        .iter()
        .filter(|cell| !(cell.cells().iter().all(|&c| c > 0) && below[cell.to_index(m) - all_ones]))
        .cloned()
        .collect()
}

/// How representatives are picked inside each partition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Selection {
    /// First points in SUM order.
    Sorted,
    /// Points with the largest dominance-region volume. Needs normalized data.
    Region,
    /// Uniform sample; a baseline.
    Random,
}

impl Selection {
    pub fn name(self) -> &'static str {
        match self {
            Self::Sorted => "SORTED",
            Self::Region => "REGION",
            Self::Random => "RANDOM",
        }
    }
}

impl fmt::Display for Selection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Selection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sorted" => Ok(Self::Sorted),
            "region" => Ok(Self::Region),
            "random" | "random-reps" => Ok(Self::Random),
            other => Err(Error::Config(format!("unknown representative selection `{other}`"))),
        }
    }
}

/// An antichain of points broadcast to every partition for pruning.
#[derive(Debug, Clone, PartialEq)]
pub struct Representatives {
    points: Vec<Point>,
    selection: Selection,
    q: usize,
}

impl Representatives {
    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn selection(&self) -> Selection {
        self.selection
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

fn check_q(q: usize) -> Result<()> {
    if q == 0 {
        return Err(Error::Config("representatives per partition must be at least 1".into()));
    }
    Ok(())
}

/// Best `q` points of a partition under `cmp`, in `cmp` order.
fn top_q<'a>(part: &[&'a Point], q: usize, cmp: impl Fn(&&'a Point, &&'a Point) -> Ordering) -> Vec<&'a Point> {
    let mut v = part.to_vec();
    if v.len() > q {
        v.select_nth_unstable_by(q - 1, &cmp);
        v.truncate(q);
    }
    v.sort_unstable_by(cmp);
    v
}

fn sorted_candidates<'a>(part: &[&'a Point], q: usize) -> Vec<&'a Point> {
    let f = ScoringFunction::Sum;
    top_q(part, q, |a, b| {
        f.score(a.coords())
            .total_cmp(&f.score(b.coords()))
            .then_with(|| lex_then_id(a, b))
    })
}

fn region_candidates<'a>(part: &[&'a Point], q: usize) -> Vec<&'a Point> {
    top_q(part, q, |a, b| {
        unit_volume(b.coords())
            .total_cmp(&unit_volume(a.coords()))
            .then_with(|| a.id().cmp(&b.id()))
    })
}

fn random_candidates<'a>(part: &[&'a Point], q: usize, seed: u64, stream: u64) -> Vec<&'a Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let mut picked = rand::seq::index::sample(&mut rng, part.len(), q.min(part.len())).into_vec();
    picked.sort_unstable();
    picked.into_iter().map(|i| part[i]).collect()
}

fn check_unit_range(parts: &[Vec<&Point>]) -> Result<()> {
    for p in parts.iter().flatten() {
        if let Some(value) = p.out_of_unit_range() {
            return Err(Error::NotNormalized { id: p.id(), value });
        }
    }
    Ok(())
}

/// Per-partition candidate selection followed by antichain pruning.
pub(crate) fn select_refs<'a>(
    parts: &[Vec<&'a Point>],
    selection: Selection,
    q: usize,
    seed: u64,
) -> Result<Vec<&'a Point>> {
    check_q(q)?;
    if selection == Selection::Region {
        check_unit_range(parts)?;
    }
    let candidates: Vec<&Point> = parts
        .par_iter()
        .enumerate()
        .flat_map_iter(|(i, part)| match selection {
            Selection::Sorted => sorted_candidates(part, q),
            Selection::Region => region_candidates(part, q),
            Selection::Random => random_candidates(part, q, seed, i as u64),
        })
        .collect();
    Ok(prune_refs(&candidates))
}

fn prune_refs<'a>(candidates: &[&'a Point]) -> Vec<&'a Point> {
    let mut kept = sfs_refs(candidates, ScoringFunction::Sum);
    kept.sort_unstable_by_key(|p| p.id());
    kept
}

fn to_refs(parts: &[Dataset]) -> Vec<Vec<&Point>> {
    parts.iter().map(|d| d.iter().collect()).collect()
}

fn build(points: Vec<&Point>, selection: Selection, q: usize) -> Representatives {
    Representatives {
        points: points.into_iter().cloned().collect(),
        selection,
        q,
    }
}

/// Takes the first `q` points of each partition in SUM order and prunes the union.
pub fn select_representatives_sorted(partitions: &[Dataset], q: usize) -> Result<Representatives> {
    let picked = select_refs(&to_refs(partitions), Selection::Sorted, q, 0)?;
    Ok(build(picked, Selection::Sorted, q))
}

/// Takes the `q` points of each partition with the largest dominance region
/// (ties to the smaller id) and prunes the union.
pub fn select_representatives_region(partitions: &[Dataset], q: usize) -> Result<Representatives> {
    let picked = select_refs(&to_refs(partitions), Selection::Region, q, 0)?;
    Ok(build(picked, Selection::Region, q))
}

/// Seeded uniform sample of `q` points per partition, pruned to an antichain.
pub fn select_representatives_random(partitions: &[Dataset], q: usize, seed: u64) -> Result<Representatives> {
    let picked = select_refs(&to_refs(partitions), Selection::Random, q, seed)?;
    Ok(build(picked, Selection::Random, q))
}

/// Drops dominated candidates. The result is sorted by id.
pub fn prune_dominated_reps(candidates: &[Point]) -> Vec<Point> {
    let refs: Vec<&Point> = candidates.iter().collect();
    prune_refs(&refs).into_iter().cloned().collect()
}

pub(crate) fn prefilter_refs<'a>(part: &[&'a Point], reps: &[&Point]) -> Vec<&'a Point> {
    if reps.is_empty() {
        return part.to_vec();
    }
    part.iter()
        .copied()
        .filter(|t| !is_dominated_by(t, reps.iter().copied()))
        .collect()
}

/// Removes the points of `partition` dominated by a representative and
/// returns the survivors together with the number removed.
pub fn rep_prefilter(partition: &Dataset, reps: &Representatives) -> Result<(Dataset, usize)> {
    if let Some(r) = reps.points.first() {
        if r.dim() != partition.dim() {
            return Err(Error::DimensionMismatch {
                expected: partition.dim(),
                found: r.dim(),
            });
        }
    }
    let refs: Vec<&Point> = partition.iter().collect();
    let rep_refs: Vec<&Point> = reps.points.iter().collect();
    let kept: Vec<Point> = prefilter_refs(&refs, &rep_refs).into_iter().cloned().collect();
    let removed = partition.len() - kept.len();
    Ok((
        Dataset::from_parts(partition.dim(), kept, partition.is_normalized()),
        removed,
    ))
}
