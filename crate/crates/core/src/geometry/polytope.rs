use serde::{Deserialize, Serialize};

use super::hull;
use super::linalg::{dist2, dot, norm, simplex_measure, simplex_volume};
use super::point::{Point, PointSet};
use crate::error::{Error, Result};

/// Half-space `{x : normal · x <= offset}` with a unit normal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Halfspace {
    pub normal: Vec<f64>,
    pub offset: f64,
}

impl Halfspace {
    /// `offset - normal · x`; non-negative inside.
    #[inline]
    pub fn slack(&self, x: &[f64]) -> f64 {
        self.offset - dot(&self.normal, x)
    }
}

/// Simplicial facet as produced by the hull builder.
#[derive(Debug, Clone)]
pub(crate) struct HullFacet {
    pub verts: Vec<usize>,
    pub neighbors: Vec<usize>,
    pub normal: Vec<f64>,
    pub offset: f64,
}

/// A full-dimensional convex polytope in V- and H-representation.
///
/// Facets are stored as merged half-spaces (coplanar simplicial pieces of the
/// hull share one entry); the boundary triangulation used for volumes,
/// surface areas and sampling is kept alongside.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Polytope {
    dim: usize,
    vertices: PointSet,
    facets: Vec<Halfspace>,
    interior_point: Point,
    /// boundary (d-1)-simplices as vertex indices, with the facet each lies on
    simplices: Vec<Vec<usize>>,
    simplex_facet: Vec<usize>,
    source_indices: Option<Vec<usize>>,
    inner_radius: f64,
    tol: f64,
}

impl Polytope {
    pub(crate) fn from_hull(
        vertices: PointSet,
        hull_facets: Vec<HullFacet>,
        source_indices: Vec<usize>,
        tol: f64,
    ) -> Result<Self> {
        let dim = vertices.dim();
        let nf = hull_facets.len();

        // merge adjacent coplanar simplicial facets
        let mut parent: Vec<usize> = (0..nf).collect();
        fn find(p: &mut [usize], mut i: usize) -> usize {
            while p[i] != i {
                p[i] = p[p[i]];
                i = p[i];
            }
            i
        }
        for (i, f) in hull_facets.iter().enumerate() {
            for &j in &f.neighbors {
                if j <= i || j >= nf {
                    continue;
                }
                let g = &hull_facets[j];
                if dot(&f.normal, &g.normal) <= 0.0 {
                    continue;
                }
                let coplanar = g.verts.iter().all(|&v| (dot(&f.normal, vertices.point(v)) - f.offset).abs() <= tol);
                if coplanar {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    if a != b {
                        parent[b.max(a)] = a.min(b);
                    }
                }
            }
        }
        let mut group_of = vec![usize::MAX; nf];
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for i in 0..nf {
            let r = find(&mut parent, i);
            if group_of[r] == usize::MAX {
                group_of[r] = groups.len();
                groups.push(Vec::new());
            }
            group_of[i] = group_of[r];
            groups[group_of[r]].push(i);
        }
        let facets: Vec<Halfspace> = groups
            .iter()
            .map(|members| {
                let mut normal = vec![0.0; dim];
                for &m in members {
                    normal.iter_mut().zip(&hull_facets[m].normal).for_each(|(a, b)| *a += b);
                }
                let l = norm(&normal);
                normal.iter_mut().for_each(|c| *c /= l);
                let offset = members
                    .iter()
                    .flat_map(|&m| hull_facets[m].verts.iter())
                    .map(|&v| dot(&normal, vertices.point(v)))
                    .fold(f64::NEG_INFINITY, f64::max);
                Halfspace { normal, offset }
            })
            .collect();
        let simplices: Vec<Vec<usize>> = hull_facets.iter().map(|f| f.verts.clone()).collect();
        let simplex_facet: Vec<usize> = (0..nf).map(|i| group_of[i]).collect();
        Self::assemble(vertices, facets, simplices, simplex_facet, Some(source_indices), tol)
    }

    fn assemble(
        vertices: PointSet,
        facets: Vec<Halfspace>,
        simplices: Vec<Vec<usize>>,
        simplex_facet: Vec<usize>,
        source_indices: Option<Vec<usize>>,
        tol: f64,
    ) -> Result<Self> {
        let dim = vertices.dim();
        let mut c = vec![0.0; dim];
        for v in vertices.iter() {
            c.iter_mut().zip(v).for_each(|(a, b)| *a += b);
        }
        let nv = vertices.len().max(1) as f64;
        c.iter_mut().for_each(|a| *a /= nv);
        let inner_radius = facets.iter().map(|f| f.slack(&c)).fold(f64::INFINITY, f64::min);
        if !(inner_radius > 0.0) {
            return Err(Error::InvalidPolytope("vertex centroid is not strictly interior".into()));
        }
        Ok(Polytope {
            dim,
            vertices,
            facets,
            interior_point: Point(c),
            simplices,
            simplex_facet,
            source_indices,
            inner_radius,
            tol,
        })
    }

    /// Convex hull of `points` with the default tolerance.
    pub fn hull(points: &PointSet) -> Result<Self> {
        hull::convex_hull_default(points)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &PointSet {
        &self.vertices
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn facets(&self) -> &[Halfspace] {
        &self.facets
    }

    pub fn interior_point(&self) -> &Point {
        &self.interior_point
    }

    /// Boundary triangulation: (d-1)-simplices as indices into [`Self::vertices`].
    pub fn boundary_simplices(&self) -> &[Vec<usize>] {
        &self.simplices
    }

    /// Input indices of the vertices, when built by the hull routine.
    pub fn source_indices(&self) -> Option<&[usize]> {
        self.source_indices.as_deref()
    }

    /// Tolerance the polytope was built with.
    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    /// Radius of a ball around the interior point that lies inside the polytope.
    pub fn inner_radius(&self) -> f64 {
        self.inner_radius
    }

    /// Volume by signed-simplex decomposition from the interior point.
    pub fn volume(&self) -> Result<f64> {
        self.check_triangulation()?;
        let c = self.interior_point.coords();
        let mut refs: Vec<&[f64]> = Vec::with_capacity(self.dim + 1);
        let mut total = 0.0;
        for s in &self.simplices {
            refs.clear();
            refs.push(c);
            refs.extend(s.iter().map(|&v| self.vertices.point(v)));
            total += simplex_volume(&refs);
        }
        Ok(total)
    }

    /// Volumes of the cones from the interior point over each boundary simplex.
    pub(crate) fn cone_volumes(&self) -> Vec<f64> {
        let c = self.interior_point.coords();
        self.simplices
            .iter()
            .map(|s| {
                let mut refs: Vec<&[f64]> = vec![c];
                refs.extend(s.iter().map(|&v| self.vertices.point(v)));
                simplex_volume(&refs)
            })
            .collect()
    }

    /// (d-1)-dimensional boundary measure.
    pub fn surface_area(&self) -> f64 {
        self.simplices
            .iter()
            .map(|s| {
                let refs: Vec<&[f64]> = s.iter().map(|&v| self.vertices.point(v)).collect();
                simplex_measure(&refs)
            })
            .sum()
    }

    fn check_triangulation(&self) -> Result<()> {
        let scale = self.tol.max(1e-12) * 1e3;
        for (s, &f) in self.simplices.iter().zip(&self.simplex_facet) {
            if s.len() != self.dim {
                return Err(Error::InvalidPolytope(format!(
                    "boundary simplex has {} vertices, expected {}",
                    s.len(),
                    self.dim
                )));
            }
            let facet = self
                .facets
                .get(f)
                .ok_or_else(|| Error::InvalidPolytope(format!("boundary simplex refers to missing facet {f}")))?;
            for &v in s {
                if v >= self.vertices.len() {
                    return Err(Error::InvalidPolytope(format!("vertex index {v} out of range")));
                }
                if facet.slack(self.vertices.point(v)).abs() > scale {
                    return Err(Error::InvalidPolytope(format!("vertex {v} is off its facet hyperplane")));
                }
            }
        }
        Ok(())
    }

    /// True iff every facet inequality holds with slack >= -tol.
    pub fn contains(&self, x: &[f64], tol: f64) -> Result<bool> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: x.len() });
        }
        Ok(self.contains_unchecked(x, tol))
    }

    #[inline]
    pub(crate) fn contains_unchecked(&self, x: &[f64], tol: f64) -> bool {
        let r = self.inner_radius;
        if dist2(x, self.interior_point.coords()) <= r * r {
            return true;
        }
        self.facets.iter().all(|f| f.slack(x) >= -tol)
    }

    /// Largest facet violation `max(normal·x - offset)`; positive outside.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        self.facets.iter().map(|f| -f.slack(x)).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Axis-aligned bounding box of the vertices.
    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        let mut lo = vec![f64::INFINITY; self.dim];
        let mut hi = vec![f64::NEG_INFINITY; self.dim];
        for v in self.vertices.iter() {
            for k in 0..self.dim {
                lo[k] = lo[k].min(v[k]);
                hi[k] = hi[k].max(v[k]);
            }
        }
        (lo, hi)
    }

    /// Checks the structural invariants: vertices satisfy every facet within
    /// tolerance, each vertex lies on at least d facets, the interior point is
    /// strictly inside, and the boundary triangulation is consistent.
    pub fn validate(&self) -> Result<()> {
        let tol = self.tol.max(1e-12) * 10.0;
        for (i, v) in self.vertices.iter().enumerate() {
            let mut incident = 0;
            for f in &self.facets {
                let s = f.slack(v);
                if s < -tol {
                    return Err(Error::InvalidPolytope(format!("vertex {i} violates a facet by {s:e}")));
                }
                if s <= tol {
                    incident += 1;
                }
            }
            if incident < self.dim {
                return Err(Error::InvalidPolytope(format!(
                    "vertex {i} lies on {incident} facets, expected >= {}",
                    self.dim
                )));
            }
        }
        if self.facets.iter().any(|f| f.slack(self.interior_point.coords()) <= 0.0) {
            return Err(Error::InvalidPolytope("interior point not strictly inside".into()));
        }
        self.check_triangulation()
    }

    /// Applies `x -> a x + shift` to vertices, facets and triangulation.
    pub(crate) fn mapped(
        &self,
        a: &nalgebra::DMatrix<f64>,
        a_inv_t: &nalgebra::DMatrix<f64>,
        shift: &[f64],
    ) -> Result<Self> {
        let d = self.dim;
        let map_point = |p: &[f64]| -> Vec<f64> {
            (0..d).map(|r| (0..d).map(|c| a[(r, c)] * p[c]).sum::<f64>() + shift[r]).collect()
        };
        let mut vertices = PointSet::with_capacity(d, self.vertices.len());
        for v in self.vertices.iter() {
            vertices.push_unchecked(&map_point(v));
        }
        let facets = self
            .facets
            .iter()
            .map(|f| {
                let mut n: Vec<f64> = (0..d).map(|r| (0..d).map(|c| a_inv_t[(r, c)] * f.normal[c]).sum()).collect();
                let mut b = f.offset + dot(&n, shift);
                let l = norm(&n);
                n.iter_mut().for_each(|c| *c /= l);
                b /= l;
                Halfspace { normal: n, offset: b }
            })
            .collect();
        let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
        Self::assemble(
            vertices,
            facets,
            self.simplices.clone(),
            self.simplex_facet.clone(),
            self.source_indices.clone(),
            self.tol * scale,
        )
    }
}

/// Free-function form of [`Polytope::volume`].
pub fn polytope_volume(p: &Polytope) -> Result<f64> {
    p.volume()
}

/// Free-function form of [`Polytope::contains`].
pub fn contains(p: &Polytope, x: &[f64], tol: f64) -> Result<bool> {
    p.contains(x, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn unit_square() -> Polytope {
        Polytope::hull(&PointSet::from_rows(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap()).unwrap()
    }

    #[test]
    fn containment_examples() {
        let sq = unit_square();
        assert!(sq.contains(&[0.5, 0.5], 0.0).unwrap());
        assert!(sq.contains(&[1.0, 1.0], 1e-12).unwrap());
        assert!(sq.contains(&[0.0, 0.3], 1e-12).unwrap());
        assert!(!sq.contains(&[2.0, 0.5], 1e-9).unwrap());
        assert!(matches!(sq.contains(&[0.5], 0.0), Err(Error::DimensionMismatch { expected: 2, found: 1 })));
    }

    #[test]
    fn regular_hexagon_area() {
        let rows: Vec<Vec<f64>> = (0..6)
            .map(|k| {
                let t = k as f64 * std::f64::consts::PI / 3.0;
                vec![t.cos(), t.sin()]
            })
            .collect();
        let h = Polytope::hull(&PointSet::from_rows(&rows).unwrap()).unwrap();
        assert_relative_eq!(h.volume().unwrap(), 1.5 * 3f64.sqrt(), epsilon = 1e-12);
        assert_relative_eq!(h.surface_area(), 6.0, epsilon = 1e-12);
    }

    #[test]
    fn square_invariants_and_box() {
        let sq = unit_square();
        sq.validate().unwrap();
        assert_eq!(sq.facets().len(), 4);
        let (lo, hi) = sq.bounding_box();
        assert_eq!(lo, vec![0.0, 0.0]);
        assert_eq!(hi, vec![1.0, 1.0]);
        assert_relative_eq!(sq.inner_radius(), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn corrupted_triangulation_is_rejected() {
        let mut sq = unit_square();
        sq.simplices[0] = vec![0];
        assert!(matches!(sq.volume(), Err(Error::InvalidPolytope(_))));
    }
}
