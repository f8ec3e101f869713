//! Parallel skyline computation.
//!
//! A dataset is split into partitions (random, grid, angular or sliced),
//! each partition's local skyline is computed on a thread pool, and the
//! local skylines are merged into the global skyline. Grid filtering and
//! representative filtering discard dominated data before the local phase;
//! the NoSeq merge replaces the final sequential pass with per-partition
//! relative-skyline checks.
//!
//! ```
//! use skyline::{generate, run, skyline_bruteforce, Distribution, GenSpec, Preset};
//!
//! let r = generate(&GenSpec::new(Distribution::Anticorrelated, 2000, 3, 7)).unwrap();
//! let result = run(&r, &Preset::NoSeq.config(16).with_workers(2)).unwrap();
//! assert_eq!(result.skyline, skyline_bruteforce(&r));
//! ```

pub mod datagen;
pub mod dominance;
pub mod engine;
pub mod error;
pub mod filter;
pub mod partition;
pub mod report;
pub mod sequential;

pub use datagen::{generate, ingest_csv, normalize, write_csv, Direction, Distribution, GenSpec};
pub use dominance::{
    dominance_region_volume, dominates, relative_skyline, skyline_bruteforce, try_dominates, Dataset, Point, SkylineSet,
};
pub use engine::{
    compute_local_skylines, merge_noseq, merge_sequential, potential_dominators, run, EngineConfig, FilterMode,
    MergeMode, PhaseMetrics, Preset, RunResult, DEFAULT_PARTITIONS,
};
pub use error::{Error, Result};
pub use filter::{
    grid_filter, prune_dominated_reps, rep_prefilter, select_representatives_random, select_representatives_region,
    select_representatives_sorted, OccupancyMap, Representatives, Selection, DEFAULT_REPS_PER_PARTITION,
};
pub use partition::{
    angular_index, assign, assign_angular, assign_grid, assign_random, assign_sliced, grid_dominates, grid_index,
    hyperspherical_angles, snap_slices, weak_grid_dominates, GridCoords, PartitionAssignment, PartitionConfig,
    PartitionMeta, Strategy,
};
pub use report::RunReport;
pub use sequential::{sfs, sfs_presorted, ScoringFunction};
