//! Lattice points of N0^n and finite, duplicate-free point sets.
//!
//! A [`PointSet`] keeps its points sorted in cube order, so two sets are equal
//! exactly when their point vectors are equal, and the points of an initial
//! segment come out in the order they were enumerated.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::order::cube_cmp_unchecked;

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(Vec<u64>);

impl Point {
    pub fn new(coords: Vec<u64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::ZeroDimension);
        }
        Ok(Point(coords))
    }

    /// The origin of N0^n.
    pub fn origin(n: usize) -> Result<Self> {
        Point::new(vec![0; n])
    }

    pub(crate) fn from_vec(coords: Vec<u64>) -> Self {
        Point(coords)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[u64] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<u64> {
        self.0
    }

    /// The point with coordinate `axis` removed.
    pub fn without_axis(&self, axis: usize) -> Point {
        let mut c = self.0.clone();
        c.remove(axis);
        Point(c)
    }

    /// The point with `value` inserted so that it becomes coordinate `axis`.
    pub fn with_axis(&self, axis: usize, value: u64) -> Point {
        let mut c = self.0.clone();
        c.insert(axis, value);
        Point(c)
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, c) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl From<Point> for Vec<u64> {
    fn from(p: Point) -> Self {
        p.0
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PointSet {
    dim: usize,
    points: Vec<Point>,
}

impl PointSet {
    /// Builds a set from arbitrary points, rejecting mixed dimensions and duplicates.
    pub fn new(dim: usize, mut points: Vec<Point>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        if let Some(p) = points.iter().find(|p| p.dim() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: p.dim() });
        }
        points.sort_by(cube_cmp_unchecked);
        if let Some(w) = points.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicatePoint(w[0].0.clone()));
        }
        Ok(PointSet { dim, points })
    }

    pub fn from_coords(dim: usize, coords: Vec<Vec<u64>>) -> Result<Self> {
        PointSet::new(dim, coords.into_iter().map(Point).collect())
    }

    pub fn empty(dim: usize) -> Result<Self> {
        PointSet::new(dim, Vec::new())
    }

    /// Points must already be distinct, of dimension `dim`, and in cube order.
    pub(crate) fn from_sorted(dim: usize, points: Vec<Point>) -> Self {
        debug_assert!(points.windows(2).all(|w| cube_cmp_unchecked(&w[0], &w[1]).is_lt()));
        PointSet { dim, points }
    }

    /// Like [`PointSet::new`] for points known to be distinct and well-formed.
    pub(crate) fn from_distinct(dim: usize, mut points: Vec<Point>) -> Self {
        points.sort_by(cube_cmp_unchecked);
        PointSet::from_sorted(dim, points)
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

    /// Points in cube order.
    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Point> {
        self.points.iter()
    }

    pub fn contains(&self, p: &Point) -> bool {
        p.dim() == self.dim && self.points.binary_search_by(|q| cube_cmp_unchecked(q, p)).is_ok()
    }

    pub fn to_coords(&self) -> Vec<Vec<u64>> {
        self.points.iter().map(|p| p.0.clone()).collect()
    }

    /// Relabels coordinate axes: coordinate `j` of each image point is
    /// coordinate `perm[j]` of the original.
    pub fn permute_axes(&self, perm: &[usize]) -> Result<PointSet> {
        let mut seen = vec![false; self.dim];
        if perm.len() != self.dim || perm.iter().any(|&a| a >= self.dim || std::mem::replace(&mut seen[a], true)) {
            return Err(Error::OutOfRange {
                what: "axis permutation",
                detail: format!("{perm:?} is not a permutation of 0..{}", self.dim),
            });
        }
        let points = self.points.iter().map(|p| Point(perm.iter().map(|&a| p.0[a]).collect())).collect();
        Ok(PointSet::from_distinct(self.dim, points))
    }

    pub fn swap_axes(&self, a: usize, b: usize) -> Result<PointSet> {
        let mut perm: Vec<usize> = (0..self.dim).collect();
        if a >= self.dim || b >= self.dim {
            return Err(Error::OutOfRange { what: "axis", detail: format!("{a} or {b} >= {}", self.dim) });
        }
        perm.swap(a, b);
        self.permute_axes(&perm)
    }
}

impl fmt::Debug for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.points.iter()).finish()
    }
}

impl<'a> IntoIterator for &'a PointSet {
    type Item = &'a Point;
    type IntoIter = std::slice::Iter<'a, Point>;

    fn into_iter(self) -> Self::IntoIter {
        self.points.iter()
    }
}
