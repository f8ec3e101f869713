//! The partition / local-skyline / merge pipeline.
//!
//! A run partitions the dataset, optionally drops grid-dominated cells or
//! selects representatives, computes one local skyline per partition on a
//! pool of `workers` threads and finally merges them, either with one
//! sequential SFS pass over the union or with the fully parallel NoSeq
//! scheme, where each local skyline is checked only against its partition's
//! potential dominators.
//!
//! The skyline of a run depends only on the dataset and the configuration,
//! never on the worker count or scheduling order.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dominance::{dominates_coords, Dataset, Point, SkylineSet};
use crate::error::{Error, Result};
use crate::filter::{grid_filter, prefilter_refs, select_refs, Representatives, Selection, DEFAULT_REPS_PER_PARTITION};
use crate::partition::{
    assign, weak_grid_dominates, GridCoords, PartitionAssignment, PartitionConfig, PartitionMeta, Strategy,
};
use crate::sequential::{lex_then_id, sfs_refs, window_scan, ScoringFunction};

/// Target partition count when none is given.
pub const DEFAULT_PARTITIONS: usize = 120;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FilterMode {
    #[default]
    None,
    /// Drop partitions whose cell is grid-dominated by an occupied cell.
    Grid,
    /// Prune each partition against broadcast representatives.
    Representative { selection: Selection, q: usize },
}

impl FilterMode {
    pub fn name(self) -> &'static str {
        match self {
            Self::None => "NONE",
            Self::Grid => "GRID-FILTER",
            Self::Representative { .. } => "REPRESENTATIVE",
        }
    }

    pub fn representatives(selection: Selection) -> Self {
        Self::Representative {
            selection,
            q: DEFAULT_REPS_PER_PARTITION,
        }
    }
}

impl fmt::Display for FilterMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Representative { selection, q } => write!(f, "REPRESENTATIVE-{selection}({q})"),
            other => f.write_str(other.name()),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MergeMode {
    #[default]
    Sequential,
    NoSeq,
}

impl MergeMode {
    pub fn name(self) -> &'static str {
        match self {
            Self::Sequential => "SEQUENTIAL",
            Self::NoSeq => "NOSEQ",
        }
    }
}

impl fmt::Display for MergeMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MergeMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "seq" | "sequential" => Ok(Self::Sequential),
            "noseq" | "no-seq" => Ok(Self::NoSeq),
            other => Err(Error::Config(format!("unknown merge mode `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EngineConfig {
    pub partition: PartitionConfig,
    pub filter: FilterMode,
    pub merge: MergeMode,
    pub workers: usize,
    pub seed: u64,
}

impl EngineConfig {
    /// No filtering, sequential merge, one worker per available core.
    pub fn new(partition: PartitionConfig) -> Self {
        Self {
            partition,
            filter: FilterMode::None,
            merge: MergeMode::Sequential,
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
            seed: 0,
        }
    }

    pub fn with_filter(mut self, filter: FilterMode) -> Self {
        self.filter = filter;
        self
    }

    pub fn with_merge(mut self, merge: MergeMode) -> Self {
        self.merge = merge;
        self
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.workers == 0 {
            return Err(Error::Config("at least one worker is required".into()));
        }
        if self.partition.partitions == 0 {
            return Err(Error::Config("partition count must be at least 1".into()));
        }
        match self.filter {
            FilterMode::Grid if self.partition.strategy != Strategy::Grid => Err(Error::Config(format!(
                "grid filtering requires GRID partitioning, not {}",
                self.partition.strategy
            ))),
            FilterMode::Representative { q: 0, .. } => {
                Err(Error::Config("representatives per partition must be at least 1".into()))
            }
            _ => Ok(()),
        }
    }
}

/// The named configurations used in experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Preset {
    Random,
    Grid,
    Angular,
    Sliced,
    /// Sliced with SORTED representative filtering.
    SlicedPlus,
    /// Angular with SORTED representative filtering.
    AngularPlus,
    /// Sliced with the parallel merge.
    NoSeq,
}

impl Preset {
    pub const ALL: [Preset; 7] = [
        Self::Random,
        Self::Grid,
        Self::Angular,
        Self::Sliced,
        Self::SlicedPlus,
        Self::AngularPlus,
        Self::NoSeq,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Random => "random",
            Self::Grid => "grid",
            Self::Angular => "angular",
            Self::Sliced => "sliced",
            Self::SlicedPlus => "sliced+",
            Self::AngularPlus => "angular+",
            Self::NoSeq => "noseq",
        }
    }

    pub fn strategy(self) -> Strategy {
        match self {
            Self::Random => Strategy::Random,
            Self::Grid => Strategy::Grid,
            Self::Angular | Self::AngularPlus => Strategy::Angular,
            Self::Sliced | Self::SlicedPlus | Self::NoSeq => Strategy::Sliced,
        }
    }

    pub fn filter(self) -> FilterMode {
        match self {
            Self::SlicedPlus | Self::AngularPlus => FilterMode::representatives(Selection::Sorted),
            _ => FilterMode::None,
        }
    }

    pub fn merge(self) -> MergeMode {
        match self {
            Self::NoSeq => MergeMode::NoSeq,
            _ => MergeMode::Sequential,
        }
    }

    pub fn config(self, partitions: usize) -> EngineConfig {
        EngineConfig::new(PartitionConfig::new(self.strategy(), partitions))
            .with_filter(self.filter())
            .with_merge(self.merge())
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        Self::ALL
            .into_iter()
            .find(|p| p.name() == lower)
            .ok_or_else(|| Error::Config(format!("unknown preset `{s}`")))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PhaseMetrics {
    pub partition_ms: f64,
    pub local_ms: f64,
    pub merge_ms: f64,
    /// One entry per effective partition, zero for empty or dropped ones.
    pub local_skyline_sizes: Vec<usize>,
    pub union_size: usize,
    /// Points removed by grid or representative filtering.
    pub filtered_count: usize,
    pub final_size: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub skyline: SkylineSet,
    pub metrics: PhaseMetrics,
    pub config: EngineConfig,
    pub effective_p: usize,
    pub n: usize,
    pub d: usize,
}

fn millis(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

/// Local skyline of one partition after optional representative pruning.
/// Returns the skyline in scan order and the number of pruned points.
fn local_skyline<'a>(part: &[&'a Point], reps: Option<&[&Point]>, presorted: bool) -> (Vec<&'a Point>, usize) {
    if part.is_empty() {
        return (Vec::new(), 0);
    }
    let survivors;
    let (input, pruned) = match reps {
        Some(reps) => {
            survivors = prefilter_refs(part, reps);
            let pruned = part.len() - survivors.len();
            (survivors.as_slice(), pruned)
        }
        None => (part, 0),
    };
    let sky = if presorted {
        window_scan(input)
    } else {
        sfs_refs(input, ScoringFunction::Sum)
    };
    (sky, pruned)
}

fn merge_sequential_refs<'a>(locals: &[Vec<&'a Point>]) -> Vec<&'a Point> {
    let union: Vec<&Point> = locals.iter().flatten().copied().collect();
    sfs_refs(&union, ScoringFunction::Sum)
}

/// How `pd_i` is derived from the partitioning.
enum DominatorPlan {
    /// Every other local skyline.
    AllOthers,
    /// Local skylines of earlier partitions.
    Preceding,
    /// Local skylines of cells that weakly grid-dominate cell `i`.
    WeakGrid { slices: usize, dim: usize },
}

impl DominatorPlan {
    fn of(assignment: &PartitionAssignment) -> Self {
        match assignment.meta() {
            PartitionMeta::Random | PartitionMeta::Angular { .. } => Self::AllOthers,
            PartitionMeta::Sliced { .. } => Self::Preceding,
            PartitionMeta::Grid { slices, .. } => Self::WeakGrid {
                slices: *slices,
                dim: assignment.dim(),
            },
        }
    }
}

/// Partitions whose local skylines form `pd_i`, in increasing order.
fn dominator_partitions(plan: &DominatorPlan, locals: &[Vec<&Point>], i: usize) -> Vec<usize> {
    let non_empty = (0..locals.len()).filter(|&j| !locals[j].is_empty());
    match *plan {
        DominatorPlan::AllOthers => non_empty.filter(|&j| j != i).collect(),
        DominatorPlan::Preceding => non_empty.take_while(|&j| j < i).collect(),
        DominatorPlan::WeakGrid { slices, dim } => {
            let own = GridCoords::from_index(i, slices, dim);
            non_empty
                .filter(|&j| weak_grid_dominates(&GridCoords::from_index(j, slices, dim), &own).unwrap_or(false))
                .collect()
        }
    }
}

/// The union of the local skylines in topological order, shared read-only
/// by all partitions. A dominator of `t` always precedes `t` in this order,
/// so `t` is only compared with the members of `pd_i` ranked before it.
struct SortedUnion<'p> {
    /// (point, partition) in topological order.
    entries: Vec<(&'p Point, usize)>,
    /// Positions in `entries` of each partition's points.
    ranks: Vec<Vec<usize>>,
}

impl<'p> SortedUnion<'p> {
    fn new(locals: &[Vec<&'p Point>]) -> Self {
        let mut keyed: Vec<(f64, &Point, usize)> = locals
            .iter()
            .enumerate()
            .flat_map(|(j, u)| u.iter().map(move |p| (ScoringFunction::Sum.score(p.coords()), *p, j)))
            .collect();
        keyed.par_sort_unstable_by(|(sa, a, _), (sb, b, _)| sa.total_cmp(sb).then_with(|| lex_then_id(a, b)));
        let mut ranks: Vec<Vec<usize>> = locals.iter().map(|u| Vec::with_capacity(u.len())).collect();
        for (rank, (_, _, j)) in keyed.iter().enumerate() {
            ranks[*j].push(rank);
        }
        Self {
            entries: keyed.into_iter().map(|(_, p, j)| (p, j)).collect(),
            ranks,
        }
    }

    /// `Sky_{pd_i}(u_i)`, where `pd` lists the partitions forming `pd_i`.
    fn relative_skyline(&self, i: usize, pd: &[usize]) -> Vec<&'p Point> {
        let mut in_pd = vec![false; self.ranks.len()];
        for &j in pd {
            in_pd[j] = true;
        }
        self.ranks[i]
            .iter()
            .filter_map(|&rank| {
                let t = self.entries[rank].0;
                let dominated = self.entries[..rank]
                    .iter()
                    .any(|&(s, j)| in_pd[j] && dominates_coords(s.coords(), t.coords()));
                (!dominated).then_some(t)
            })
            .collect()
    }
}

fn merge_noseq_refs<'p>(locals: &[Vec<&'p Point>], assignment: &PartitionAssignment) -> Vec<&'p Point> {
    let plan = DominatorPlan::of(assignment);
    let union = SortedUnion::new(locals);
    (0..locals.len())
        .into_par_iter()
        .filter(|&i| !locals[i].is_empty())
        .map(|i| union.relative_skyline(i, &dominator_partitions(&plan, locals, i)))
        .flatten_iter()
        .collect()
}

fn check_locals(locals: &[SkylineSet], assignment: &PartitionAssignment) -> Result<()> {
    if locals.len() != assignment.partitions() {
        return Err(Error::Config(format!(
            "{} local skylines for {} partitions",
            locals.len(),
            assignment.partitions()
        )));
    }
    Ok(())
}

fn local_refs(locals: &[SkylineSet]) -> Vec<Vec<&Point>> {
    locals.iter().map(|u| u.points().iter().collect()).collect()
}

/// Local skylines of each partition on the current rayon pool.
///
/// With representatives, each partition is pruned first. Partitions flagged
/// as presorted skip the SFS sort.
pub fn compute_local_skylines(
    partitions: &[Dataset],
    reps: Option<&Representatives>,
    presorted: &[bool],
) -> Result<Vec<SkylineSet>> {
    if presorted.len() != partitions.len() {
        return Err(Error::Config(format!(
            "{} presorted flags for {} partitions",
            presorted.len(),
            partitions.len()
        )));
    }
    let rep_refs: Option<Vec<&Point>> = reps.map(|r| r.points().iter().collect());
    Ok(partitions
        .par_iter()
        .zip(presorted)
        .map(|(part, &sorted)| {
            let refs: Vec<&Point> = part.iter().collect();
            let (sky, _) = local_skyline(&refs, rep_refs.as_deref(), sorted);
            SkylineSet::from_refs(&sky)
        })
        .collect())
}

/// One SFS pass over the union of the local skylines.
pub fn merge_sequential(locals: &[SkylineSet]) -> SkylineSet {
    SkylineSet::from_refs(&merge_sequential_refs(&local_refs(locals)))
}

/// The points partition `i`'s local skyline must be checked against:
/// every other local skyline for Random and Angular, the preceding ones for
/// Sliced, and those of weakly grid-dominating cells for Grid.
pub fn potential_dominators(i: usize, locals: &[SkylineSet], assignment: &PartitionAssignment) -> Result<Dataset> {
    check_locals(locals, assignment)?;
    if i >= locals.len() {
        return Err(Error::Config(format!("partition {i} out of range 0..{}", locals.len())));
    }
    let refs = local_refs(locals);
    let points = dominator_partitions(&DominatorPlan::of(assignment), &refs, i)
        .into_iter()
        .flat_map(|j| locals[j].points().iter().cloned())
        .collect();
    Ok(Dataset::from_parts(assignment.dim(), points, false))
}

/// Parallel merge: the union over `i` of the local skyline of partition `i`
/// relative to its potential dominators.
pub fn merge_noseq(locals: &[SkylineSet], assignment: &PartitionAssignment) -> Result<SkylineSet> {
    check_locals(locals, assignment)?;
    Ok(SkylineSet::from_refs(&merge_noseq_refs(
        &local_refs(locals),
        assignment,
    )))
}

/// Runs the whole pipeline on a dedicated pool of `config.workers` threads.
pub fn run(r: &Dataset, config: &EngineConfig) -> Result<RunResult> {
    config.validate()?;
    let effective_p = config.partition.effective_partitions(r.dim())?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    let (skyline, metrics) = pool.install(|| run_phases(r, config))?;
    Ok(RunResult {
        skyline,
        metrics,
        config: config.clone(),
        effective_p,
        n: r.len(),
        d: r.dim(),
    })
}

fn run_phases(r: &Dataset, config: &EngineConfig) -> Result<(SkylineSet, PhaseMetrics)> {
    let started = Instant::now();
    let assignment = assign(r, &config.partition, config.seed)?;
    let mut parts = assignment.split(r);
    let mut filtered_count = 0;
    if config.filter == FilterMode::Grid {
        let occupancy = assignment
            .occupancy()
            .ok_or_else(|| Error::Config("grid filtering requires GRID partitioning".into()))?;
        let keep = grid_filter(occupancy);
        for (i, part) in parts.iter_mut().enumerate() {
            if !part.is_empty() && !assignment.cell_of(i).is_some_and(|c| keep.contains(&c)) {
                filtered_count += part.len();
                part.clear();
            }
        }
    }
    let reps = match config.filter {
        FilterMode::Representative { selection, q } => Some(select_refs(&parts, selection, q, config.seed)?),
        _ => None,
    };
    let partition_ms = millis(started.elapsed());

    let started = Instant::now();
    let presorted = assignment.is_presorted();
    let (locals, pruned): (Vec<Vec<&Point>>, Vec<usize>) = parts
        .par_iter()
        .map(|part| local_skyline(part, reps.as_deref(), presorted))
        .unzip();
    filtered_count += pruned.iter().sum::<usize>();
    let local_ms = millis(started.elapsed());

    let started = Instant::now();
    let merged = match config.merge {
        MergeMode::Sequential => merge_sequential_refs(&locals),
        MergeMode::NoSeq => merge_noseq_refs(&locals, &assignment),
    };
    let skyline = SkylineSet::from_refs(&merged);
    let merge_ms = millis(started.elapsed());

    let local_skyline_sizes: Vec<usize> = locals.iter().map(Vec::len).collect();
    let metrics = PhaseMetrics {
        partition_ms,
        local_ms,
        merge_ms,
        union_size: local_skyline_sizes.iter().sum(),
        local_skyline_sizes,
        filtered_count,
        final_size: skyline.len(),
    };
    Ok((skyline, metrics))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dominance::{dominates, skyline_bruteforce};
    use crate::partition::assign_sliced;
    use crate::partition::Strategy;
    use proptest::prelude::*;
    use proptest::strategy::Strategy as _;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ds(rows: &[&[f64]]) -> Dataset {
        Dataset::from_rows(rows[0].len(), rows.iter().map(|r| r.to_vec())).unwrap()
    }

    fn unit_dataset(n: usize, d: usize, seed: u64) -> Dataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Dataset::from_rows(
            d,
            (0..n).map(|_| (0..d).map(|_| rng.random::<f64>()).collect::<Vec<_>>()),
        )
        .unwrap()
        .into_normalized()
        .unwrap()
    }

    fn locals_for(r: &Dataset, a: &PartitionAssignment) -> Vec<SkylineSet> {
        let parts = a.split_datasets(r);
        let flags = vec![a.is_presorted(); parts.len()];
        compute_local_skylines(&parts, None, &flags).unwrap()
    }

    #[test]
    fn single_partition_is_sequential() {
        let r = unit_dataset(300, 3, 1);
        let a = assign(&r, &PartitionConfig::new(Strategy::Random, 1), 0).unwrap();
        let locals = locals_for(&r, &a);
        assert_eq!(locals, vec![skyline_bruteforce(&r)]);
        assert_eq!(merge_sequential(&locals), skyline_bruteforce(&r));
        assert_eq!(merge_noseq(&locals, &a).unwrap(), locals[0]);
    }

    #[test]
    fn two_way_split_contains_the_skyline() {
        let r = ds(&[&[1.0, 2.0], &[2.0, 1.0], &[2.0, 2.0], &[3.0, 3.0]]);
        let a = assign(&r, &PartitionConfig::new(Strategy::Random, 2), 5).unwrap();
        let locals = locals_for(&r, &a);
        let union: Vec<usize> = locals.iter().flat_map(SkylineSet::ids).collect();
        assert!(union.contains(&0) && union.contains(&1));
        for u in &locals {
            for x in u.points() {
                assert!(u.points().iter().all(|y| !dominates(x, y)));
            }
        }
    }

    #[test]
    fn universal_dominator_prunes_everything() {
        let r = ds(&[&[1.0, 2.0], &[2.0, 1.0], &[2.0, 2.0]]);
        let origin = ds(&[&[0.0, 0.0]]);
        let reps = crate::filter::select_representatives_sorted(&[origin], 1).unwrap();
        let parts = assign(&r, &PartitionConfig::new(Strategy::Random, 2), 0)
            .unwrap()
            .split_datasets(&r);
        let locals = compute_local_skylines(&parts, Some(&reps), &[false, false]).unwrap();
        assert!(locals.iter().all(SkylineSet::is_empty));
        assert!(compute_local_skylines(&parts, None, &[false]).is_err());
    }

    #[test]
    fn merge_edge_cases() {
        assert!(merge_sequential(&[]).is_empty());
        assert!(merge_sequential(&[SkylineSet::default(), SkylineSet::default()]).is_empty());
        let u = skyline_bruteforce(&ds(&[&[1.0, 2.0], &[2.0, 1.0]]));
        assert_eq!(merge_sequential(std::slice::from_ref(&u)), u);
    }

    #[test]
    fn sliced_dominators_are_preceding_partitions() {
        let r = unit_dataset(60, 2, 3);
        let a = assign_sliced(&r, 3, 0).unwrap();
        let locals = vec![
            skyline_bruteforce(&ds(&[&[0.1, 0.9], &[0.2, 0.8], &[0.3, 0.7]])),
            skyline_bruteforce(
                &Dataset::from_rows(2, (0..4).map(|i| vec![0.4 + 0.01 * i as f64, 0.6 - 0.01 * i as f64])).unwrap(),
            ),
            SkylineSet::default(),
        ];
        assert!(potential_dominators(0, &locals, &a).unwrap().is_empty());
        assert_eq!(potential_dominators(2, &locals, &a).unwrap().len(), 7);
        assert!(potential_dominators(3, &locals, &a).is_err());
        assert!(potential_dominators(0, &locals[..2], &a).is_err());
    }

    #[test]
    fn grid_origin_cell_has_no_dominators() {
        let r = unit_dataset(200, 2, 8);
        let a = assign(&r, &PartitionConfig::new(Strategy::Grid, 4), 0).unwrap();
        assert_eq!(a.partitions(), 4);
        let locals = locals_for(&r, &a);
        assert!(potential_dominators(0, &locals, &a).unwrap().is_empty());
        let top = potential_dominators(3, &locals, &a).unwrap().len();
        assert_eq!(top, locals[0].len() + locals[1].len() + locals[2].len());
    }

    #[test]
    fn noseq_sliced_drops_dominated_partition() {
        let r = ds(&[&[0.1, 0.1], &[0.2, 0.05], &[0.5, 0.5], &[0.6, 0.4]]);
        let a = assign_sliced(&r, 2, 0).unwrap();
        let locals = locals_for(&r, &a);
        assert_eq!(locals[0].ids(), vec![0, 1]);
        assert_eq!(locals[1].ids(), vec![2, 3]);
        assert_eq!(merge_noseq(&locals, &a).unwrap(), locals[0]);
    }

    #[test]
    fn config_validation() {
        let grid_filter_on_sliced =
            EngineConfig::new(PartitionConfig::new(Strategy::Sliced, 4)).with_filter(FilterMode::Grid);
        assert!(grid_filter_on_sliced.validate().is_err());
        assert!(EngineConfig::new(PartitionConfig::new(Strategy::Grid, 4))
            .with_workers(0)
            .validate()
            .is_err());
        let zero_q = FilterMode::Representative {
            selection: Selection::Sorted,
            q: 0,
        };
        assert!(EngineConfig::new(PartitionConfig::new(Strategy::Random, 4))
            .with_filter(zero_q)
            .validate()
            .is_err());
        let raw = ds(&[&[3.0, 1.0], &[1.0, 3.0]]);
        assert!(matches!(
            run(&raw, &EngineConfig::new(PartitionConfig::new(Strategy::Grid, 4))),
            Err(Error::NotNormalized { .. })
        ));
        let region = EngineConfig::new(PartitionConfig::new(Strategy::Sliced, 2))
            .with_filter(FilterMode::representatives(Selection::Region));
        assert!(matches!(run(&raw, &region), Err(Error::NotNormalized { .. })));
        assert!(run(&raw, &EngineConfig::new(PartitionConfig::new(Strategy::Sliced, 2))).is_ok());
    }

    #[test]
    fn presets() {
        let c = Preset::NoSeq.config(120);
        assert_eq!(
            (c.partition.strategy, c.merge, c.filter),
            (Strategy::Sliced, MergeMode::NoSeq, FilterMode::None)
        );
        let c = "Sliced+".parse::<Preset>().unwrap().config(60);
        assert_eq!(c.filter, FilterMode::representatives(Selection::Sorted));
        assert_eq!("angular+".parse::<Preset>().unwrap().strategy(), Strategy::Angular);
        assert!("sliced++".parse::<Preset>().is_err());
    }

    #[test]
    fn metrics_are_consistent() {
        let r = unit_dataset(2000, 3, 2);
        let none = run(
            &r,
            &EngineConfig::new(PartitionConfig::new(Strategy::Angular, 16)).with_workers(2),
        )
        .unwrap();
        assert_eq!(none.metrics.filtered_count, 0);
        for config in [
            EngineConfig::new(PartitionConfig::new(Strategy::Grid, 27)).with_filter(FilterMode::Grid),
            EngineConfig::new(PartitionConfig::new(Strategy::Sliced, 10))
                .with_filter(FilterMode::representatives(Selection::Region)),
        ] {
            let res = run(&r, &config.with_workers(3)).unwrap();
            let m = &res.metrics;
            assert_eq!(m.union_size, m.local_skyline_sizes.iter().sum::<usize>());
            assert_eq!(m.local_skyline_sizes.len(), res.effective_p);
            assert!(m.final_size <= m.union_size);
            assert!(m.union_size <= r.len() - m.filtered_count);
            assert!(m.filtered_count > 0);
            assert_eq!(res.skyline, skyline_bruteforce(&r));
        }
    }

    fn dataset_strategy() -> impl proptest::strategy::Strategy<Value = Dataset> {
        (2usize..5).prop_flat_map(|d| {
            let v = prop_oneof![0.0f64..1.0, (0u8..4).prop_map(|k| f64::from(k) / 3.0)];
            prop::collection::vec(prop::collection::vec(v, d), 0..150)
                .prop_map(move |rows| Dataset::from_rows(d, rows).unwrap().into_normalized().unwrap())
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn potential_dominators_cover_every_dominated_local_point(r in dataset_strategy(), p in 1usize..10, s in 0usize..4, seed in any::<u64>()) {
            let a = assign(&r, &PartitionConfig::new(Strategy::ALL[s], p), seed).unwrap();
            let locals = locals_for(&r, &a);
            let sky = skyline_bruteforce(&r).ids();
            for (i, u) in locals.iter().enumerate() {
                let pd = potential_dominators(i, &locals, &a).unwrap();
                prop_assert!(pd.iter().all(|x| !u.ids().contains(&x.id())));
                for t in u.points() {
                    if !sky.contains(&t.id()) {
                        prop_assert!(pd.iter().any(|s| dominates(s, t)), "no dominator for {:?} in partition {}", t, i);
                    }
                }
            }
        }

        #[test]
        fn merges_agree(r in dataset_strategy(), p in 1usize..10, s in 0usize..4, seed in any::<u64>()) {
            let a = assign(&r, &PartitionConfig::new(Strategy::ALL[s], p), seed).unwrap();
            let locals = locals_for(&r, &a);
            let expected = skyline_bruteforce(&r);
            prop_assert_eq!(&merge_sequential(&locals), &expected);
            prop_assert_eq!(&merge_noseq(&locals, &a).unwrap(), &expected);
        }

        #[test]
        fn worker_count_does_not_change_results(r in dataset_strategy(), p in 1usize..12, s in 0usize..4, noseq in any::<bool>()) {
            let merge = if noseq { MergeMode::NoSeq } else { MergeMode::Sequential };
            let config = EngineConfig::new(PartitionConfig::new(Strategy::ALL[s], p)).with_merge(merge).with_filter(FilterMode::representatives(Selection::Sorted));
            let one = run(&r, &config.clone().with_workers(1)).unwrap();
            let four = run(&r, &config.with_workers(4)).unwrap();
            prop_assert_eq!(&one.skyline, &four.skyline);
            prop_assert_eq!(&one.metrics.local_skyline_sizes, &four.metrics.local_skyline_sizes);
            prop_assert_eq!(one.metrics.filtered_count, four.metrics.filtered_count);
        }
    }
}
