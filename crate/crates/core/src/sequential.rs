//! Sort-Filter-Skyline, the per-partition kernel.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::dominance::{dominates_coords, Dataset, Point, SkylineSet};

/// Monotone scoring functions used to presort tuples.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING-KEBAB-CASE")]
pub enum ScoringFunction {
    /// Sum of coordinates.
    #[default]
    Sum,
    /// `1 - ∏ (1 - min(t[i], 1))`, the complement of the dominance-region volume.
    VolumeComplement,
}

impl ScoringFunction {
    pub fn score(self, coords: &[f64]) -> f64 {
        match self {
            Self::Sum => coords.iter().sum(),
            Self::VolumeComplement => 1.0 - coords.iter().map(|v| 1.0 - v.min(1.0)).product::<f64>(),
        }
    }
}

/// Lexicographic comparison of coordinates followed by id. Lexicographic order
/// is itself a linear extension of dominance, so it is a safe tie-breaker for
/// any monotone key.
#[inline]
pub(crate) fn lex_then_id(a: &Point, b: &Point) -> Ordering {
    a.coords()
        .iter()
        .zip(b.coords())
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
        .then_with(|| a.id().cmp(&b.id()))
}

/// Sorts `points` ascending by `f`, breaking score ties lexicographically and
/// then by id. Rounded sums can tie even when one point dominates another, so
/// the id alone would not give a topological order.
pub(crate) fn sort_topologically(points: &mut [&Point], f: ScoringFunction) {
    let mut keyed: Vec<(f64, &Point)> = points.iter().map(|p| (f.score(p.coords()), *p)).collect();
    keyed.sort_unstable_by(|(sa, a), (sb, b)| sa.total_cmp(sb).then_with(|| lex_then_id(a, b)));
    for (slot, (_, p)) in points.iter_mut().zip(keyed) {
        *slot = p;
    }
}

/// The window loop of SFS over an input that is already a topological sort.
pub(crate) fn window_scan<'a>(sorted: &[&'a Point]) -> Vec<&'a Point> {
    scan_with(sorted, |_| {})
}

fn scan_with<'a>(sorted: &[&'a Point], mut on_accept: impl FnMut(&[&'a Point])) -> Vec<&'a Point> {
    let mut window: Vec<&Point> = Vec::new();
    for &t in sorted {
        if window.iter().any(|u| dominates_coords(u.coords(), t.coords())) {
            continue;
        }
        window.push(t);
        on_accept(&window);
    }
    window
}

/// Presort by `f` and scan; the returned window is in scan order.
pub(crate) fn sfs_refs<'a>(points: &[&'a Point], f: ScoringFunction) -> Vec<&'a Point> {
    let mut sorted = points.to_vec();
    sort_topologically(&mut sorted, f);
    window_scan(&sorted)
}

pub fn sfs(r: &Dataset, f: ScoringFunction) -> SkylineSet {
    let refs: Vec<&Point> = r.iter().collect();
    SkylineSet::from_refs(&sfs_refs(&refs, f))
}

/// SFS without the sort step. The caller guarantees that no point dominates
/// an earlier one; violations are not detected.
pub fn sfs_presorted(r: &Dataset) -> SkylineSet {
    let refs: Vec<&Point> = r.iter().collect();
    SkylineSet::from_refs(&window_scan(&refs))
}
