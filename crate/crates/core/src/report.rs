//! JSON form of a run.
//!
//! Field names are fixed; downstream tooling reads them directly. The
//! canonical form leaves out `workers` and the phase timings, which are the
//! only fields that legitimately differ between runs of the same
//! configuration on the same data.

use serde::{Deserialize, Serialize};

use crate::engine::{FilterMode, RunResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub strategy: String,
    pub partitions: usize,
    pub effective_p: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slices: Option<usize>,
    pub filter: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub selection: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reps_q: Option<usize>,
    pub merge: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    pub seed: u64,
    pub n: usize,
    pub d: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub partition_ms: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub local_ms: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub merge_ms: Option<f64>,
    pub filtered: usize,
    pub union_size: usize,
    pub local_skyline_sizes: Vec<usize>,
    pub skyline_size: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_match: Option<bool>,
    /// Coordinates of the skyline points in id order.
    pub skyline: Vec<Vec<f64>>,
    /// Ids matching `skyline` row by row.
    pub skyline_ids: Vec<usize>,
}

impl RunReport {
    pub fn new(result: &RunResult) -> Self {
        let config = &result.config;
        let (selection, reps_q) = match config.filter {
            FilterMode::Representative { selection, q } => (Some(selection.name().to_string()), Some(q)),
            _ => (None, None),
        };
        let m = &result.metrics;
        Self {
            strategy: config.partition.strategy.name().to_string(),
            partitions: config.partition.partitions,
            effective_p: result.effective_p,
            slices: config.partition.slices_for(result.d).ok().flatten(),
            filter: config.filter.name().to_string(),
            selection,
            reps_q,
            merge: config.merge.name().to_string(),
            workers: Some(config.workers),
            seed: config.seed,
            n: result.n,
            d: result.d,
            partition_ms: Some(m.partition_ms),
            local_ms: Some(m.local_ms),
            merge_ms: Some(m.merge_ms),
            filtered: m.filtered_count,
            union_size: m.union_size,
            local_skyline_sizes: m.local_skyline_sizes.clone(),
            skyline_size: m.final_size,
            oracle_match: None,
            skyline: result.skyline.points().iter().map(|p| p.coords().to_vec()).collect(),
            skyline_ids: result.skyline.ids(),
        }
    }

    pub fn with_oracle(mut self, matched: bool) -> Self {
        self.oracle_match = Some(matched);
        self
    }

    /// Drops `workers` and the timings.
    pub fn canonical(mut self) -> Self {
        self.workers = None;
        self.partition_ms = None;
        self.local_ms = None;
        self.merge_ms = None;
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report fields are always serializable")
    }
}
