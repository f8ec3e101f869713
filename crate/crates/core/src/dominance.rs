//! Points, datasets and the Pareto-dominance relation.
//!
//! Smaller is better on every attribute. Dominance uses exact floating-point
//! comparisons, so two identical points never dominate each other and both
//! belong to the skyline.

use std::collections::HashSet;

use crate::error::{Error, Result};

/// A tuple of non-negative, finite coordinates tagged with a dataset-unique id.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    id: usize,
    coords: Box<[f64]>,
}

impl Point {
    pub fn new(id: usize, coords: impl Into<Vec<f64>>) -> Result<Self> {
        let coords = coords.into();
        if let Some(&value) = coords.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::InvalidCoordinate { id, value });
        }
        Ok(Self::from_parts(id, coords))
    }

    pub(crate) fn from_parts(id: usize, coords: Vec<f64>) -> Self {
        Self {
            id,
            coords: coords.into_boxed_slice(),
        }
    }

    pub fn id(&self) -> usize {
        self.id
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// Returns the first coordinate outside `[0, 1]`, if any.
    pub(crate) fn out_of_unit_range(&self) -> Option<f64> {
        self.coords.iter().copied().find(|v| *v > 1.0)
    }
}

/// An ordered collection of points sharing one dimensionality.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    dim: usize,
    points: Vec<Point>,
    normalized: bool,
}

impl Dataset {
    /// Validates that every point has `dim` coordinates and that ids are unique.
    pub fn new(dim: usize, points: Vec<Point>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::TooFewDimensions { required: 1, found: 0 });
        }
        let mut seen = HashSet::with_capacity(points.len());
        for p in &points {
            if p.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: p.dim(),
                });
            }
            if !seen.insert(p.id) {
                return Err(Error::DuplicateId(p.id));
            }
        }
        Ok(Self {
            dim,
            points,
            normalized: false,
        })
    }

    /// Builds a dataset from raw rows, assigning ids in input order starting at 0.
    pub fn from_rows<I, R>(dim: usize, rows: I) -> Result<Self>
    where
        I: IntoIterator<Item = R>,
        R: Into<Vec<f64>>,
    {
        let points = rows
            .into_iter()
            .enumerate()
            .map(|(id, row)| Point::new(id, row))
            .collect::<Result<Vec<_>>>()?;
        Self::new(dim, points)
    }

    pub fn empty(dim: usize) -> Self {
        Self {
            dim,
            points: Vec::new(),
            normalized: false,
        }
    }

    pub(crate) fn from_parts(dim: usize, points: Vec<Point>, normalized: bool) -> Self {
        Self {
            dim,
            points,
            normalized,
        }
    }

    /// Marks the dataset as normalized after checking every coordinate is in `[0, 1]`.
    pub fn into_normalized(mut self) -> Result<Self> {
        self.check_unit_range()?;
        self.normalized = true;
        Ok(self)
    }

    pub(crate) fn check_unit_range(&self) -> Result<()> {
        for p in &self.points {
            if let Some(value) = p.out_of_unit_range() {
                return Err(Error::NotNormalized { id: p.id, value });
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Point> {
        self.points.iter()
    }

    pub fn into_points(self) -> Vec<Point> {
        self.points
    }
}

impl<'a> IntoIterator for &'a Dataset {
    type Item = &'a Point;
    type IntoIter = std::slice::Iter<'a, Point>;

    fn into_iter(self) -> Self::IntoIter {
        self.points.iter()
    }
}

/// A set of mutually non-dominating points, kept sorted by id.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SkylineSet {
    points: Vec<Point>,
}

impl SkylineSet {
    pub(crate) fn from_points(mut points: Vec<Point>) -> Self {
        points.sort_unstable_by_key(Point::id);
        Self { points }
    }

    pub(crate) fn from_refs(points: &[&Point]) -> Self {
        Self::from_points(points.iter().map(|p| (*p).clone()).collect())
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn ids(&self) -> Vec<usize> {
        self.points.iter().map(Point::id).collect()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn into_points(self) -> Vec<Point> {
        self.points
    }
}

/// Coordinate-level dominance test. Slices are assumed to have equal length.
#[inline]
pub(crate) fn dominates_coords(a: &[f64], b: &[f64]) -> bool {
    let mut strict = false;
    for (x, y) in a.iter().zip(b) {
        if x > y {
            return false;
        }
        if x < y {
            strict = true;
        }
    }
    strict
}

/// True iff some point of `by` dominates `t`.
#[inline]
pub(crate) fn is_dominated_by<'a, I>(t: &Point, by: I) -> bool
where
    I: IntoIterator<Item = &'a Point>,
{
    by.into_iter().any(|s| dominates_coords(&s.coords, &t.coords))
}

/// `t` dominates `s` when it is no worse on every attribute and strictly
/// better on at least one.
///
/// Panics if the points have different dimensionality; see [`try_dominates`].
pub fn dominates(t: &Point, s: &Point) -> bool {
    assert_eq!(t.dim(), s.dim(), "dominance between points of different dimensionality");
    dominates_coords(&t.coords, &s.coords)
}

pub fn try_dominates(t: &Point, s: &Point) -> Result<bool> {
    if t.dim() != s.dim() {
        return Err(Error::DimensionMismatch {
            expected: t.dim(),
            found: s.dim(),
        });
    }
    Ok(dominates_coords(&t.coords, &s.coords))
}

/// Quadratic evaluation of the skyline definition. Used as the reference
/// result for every other algorithm in the crate.
pub fn skyline_bruteforce(r: &Dataset) -> SkylineSet {
    let survivors = r
        .points
        .iter()
        .filter(|t| !is_dominated_by(t, &r.points))
        .cloned()
        .collect();
    SkylineSet::from_points(survivors)
}

/// The points of `r` that no point of `c` dominates.
///
/// The result need not be an antichain, so it is returned as a plain subset
/// of `r` in its original order.
pub fn relative_skyline(r: &Dataset, c: &Dataset) -> Result<Dataset> {
    if r.dim != c.dim {
        return Err(Error::DimensionMismatch {
            expected: r.dim,
            found: c.dim,
        });
    }
    let kept = r
        .points
        .iter()
        .filter(|t| !is_dominated_by(t, &c.points))
        .cloned()
        .collect();
    Ok(Dataset::from_parts(r.dim, kept, r.normalized))
}

/// Hyper-volume of the part of the unit cube dominated by `t`: `∏ (1 - t[i])`.
pub fn dominance_region_volume(t: &Point) -> Result<f64> {
    if let Some(value) = t.out_of_unit_range() {
        return Err(Error::NotNormalized { id: t.id, value });
    }
    Ok(unit_volume(&t.coords))
}

#[inline]
pub(crate) fn unit_volume(coords: &[f64]) -> f64 {
    coords.iter().map(|v| 1.0 - v).product()
}
