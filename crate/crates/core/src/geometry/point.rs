use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point in R^d.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Point(pub Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Self {
        Point(coords)
    }

    pub fn origin(dim: usize) -> Self {
        Point(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }
}

impl From<Vec<f64>> for Point {
    fn from(v: Vec<f64>) -> Self {
        Point(v)
    }
}

impl<const N: usize> From<[f64; N]> for Point {
    fn from(v: [f64; N]) -> Self {
        Point(v.to_vec())
    }
}

impl AsRef<[f64]> for Point {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// A sample of points stored row-major in one contiguous buffer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSet {
    dim: usize,
    coords: Vec<f64>,
}

impl PointSet {
    pub fn new(dim: usize) -> Self {
        PointSet { dim, coords: Vec::new() }
    }

    pub fn with_capacity(dim: usize, n: usize) -> Self {
        PointSet { dim, coords: Vec::with_capacity(dim * n) }
    }

    /// Wraps a flat row-major buffer. Fails if the length is not a multiple of `dim`.
    pub fn from_flat(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 || !coords.len().is_multiple_of(dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: coords.len() % dim.max(1) });
        }
        Ok(PointSet { dim, coords })
    }

    /// Builds a set from rows; ragged input is a [`Error::DimensionMismatch`].
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let dim = rows.first().map(|r| r.as_ref().len()).ok_or(Error::EmptyInput)?;
        let mut set = PointSet::with_capacity(dim, rows.len());
        for r in rows {
            set.push(r.as_ref())?;
        }
        Ok(set)
    }

    pub fn push(&mut self, p: &[f64]) -> Result<()> {
        if p.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: p.len() });
        }
        self.coords.extend_from_slice(p);
        Ok(())
    }

    pub(crate) fn push_unchecked(&mut self, p: &[f64]) {
        debug_assert_eq!(p.len(), self.dim);
        self.coords.extend_from_slice(p);
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> std::slice::ChunksExact<'_, f64> {
        self.coords.chunks_exact(self.dim)
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.coords
    }

    pub fn to_points(&self) -> Vec<Point> {
        self.iter().map(|p| Point(p.to_vec())).collect()
    }

    /// First `n` points as a new set.
    pub fn prefix(&self, n: usize) -> PointSet {
        let n = n.min(self.len());
        PointSet { dim: self.dim, coords: self.coords[..n * self.dim].to_vec() }
    }

    /// Keeps the first `k` coordinates of every point.
    pub fn truncate_coords(&self, k: usize) -> PointSet {
        assert!(k <= self.dim);
        let mut out = PointSet::with_capacity(k, self.len());
        for p in self.iter() {
            out.coords.extend_from_slice(&p[..k]);
        }
        out
    }

    /// Largest coordinate extent of the bounding box (at least 1e-300).
    pub fn extent(&self) -> f64 {
        let mut ext = 0.0f64;
        for k in 0..self.dim {
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for p in self.iter() {
                lo = lo.min(p[k]);
                hi = hi.max(p[k]);
            }
            if hi >= lo {
                ext = ext.max(hi - lo);
            }
        }
        ext.max(1e-300)
    }
}

impl<'a> IntoIterator for &'a PointSet {
    type Item = &'a [f64];
    type IntoIter = std::slice::ChunksExact<'a, f64>;

    fn into_iter(self) -> Self::IntoIter {
        self.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ragged_rows_are_rejected() {
        let rows: Vec<Vec<f64>> = vec![vec![0.0, 1.0], vec![1.0]];
        assert!(matches!(PointSet::from_rows(&rows), Err(Error::DimensionMismatch { expected: 2, found: 1 })));
    }

    #[test]
    fn prefix_and_truncate() {
        let s = PointSet::from_rows(&[[0.0, 1.0, 2.0], [3.0, 4.0, 5.0]]).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.prefix(1).len(), 1);
        assert_eq!(s.truncate_coords(2).point(1), &[3.0, 4.0]);
        assert_eq!(s.extent(), 3.0);
    }
}
