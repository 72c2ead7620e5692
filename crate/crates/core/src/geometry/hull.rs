//! Incremental beneath-beyond convex hull in R^d.
//!
//! Points are inserted furthest-first from per-facet conflict ("outside")
//! lists, so interior points are discarded as soon as they fall beneath every
//! facet that could claim them. Facets carry an adjacency graph (the neighbour
//! opposite each vertex) which drives the visible-region search and the
//! horizon stitching. Orientation tests use unit normals and an absolute
//! tolerance, so a point within `tol` of a facet hyperplane counts as beneath it.

use std::collections::HashMap;

use super::linalg::{dot, hyperplane_normal, norm};
use super::point::PointSet;
use super::polytope::{HullFacet, Polytope};
use crate::error::{Error, Result};

/// Relative tolerance used by [`default_tolerance`].
pub const RELATIVE_TOLERANCE: f64 = 1e-9;

/// `1e-9` times the largest bounding-box extent of the sample.
pub fn default_tolerance(points: &PointSet) -> f64 {
    RELATIVE_TOLERANCE * points.extent()
}

/// Convex hull of `points` with absolute orientation tolerance `tol`.
///
/// The returned polytope keeps the input indices of its vertices
/// ([`Polytope::source_indices`]). Fails with [`Error::DegenerateInput`] when
/// the points do not affinely span R^d.
pub fn convex_hull(points: &PointSet, tol: f64) -> Result<Polytope> {
    let d = points.dim();
    if d < 2 {
        return Err(Error::InvalidArgument(format!("hull dimension must be >= 2, got {d}")));
    }
    if points.as_flat().iter().any(|c| !c.is_finite()) {
        return Err(Error::InvalidArgument("non-finite coordinate".into()));
    }
    if !(tol >= 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be >= 0, got {tol}")));
    }
    let mut b = Builder::new(points, tol)?;
    b.run()?;
    b.finish()
}

/// Convex hull with [`default_tolerance`].
pub fn convex_hull_default(points: &PointSet) -> Result<Polytope> {
    convex_hull(points, default_tolerance(points))
}

struct Facet {
    verts: Vec<u32>,
    neighbors: Vec<u32>,
    normal: Vec<f64>,
    offset: f64,
    outside: Vec<u32>,
    far: u32,
    far_dist: f64,
    alive: bool,
    mark: u32,
    visible: bool,
}

struct Builder<'a> {
    pts: &'a PointSet,
    d: usize,
    tol: f64,
    facets: Vec<Facet>,
    interior: Vec<f64>,
    epoch: u32,
}

impl<'a> Builder<'a> {
    fn new(pts: &'a PointSet, tol: f64) -> Result<Self> {
        let d = pts.dim();
        let simplex = initial_simplex(pts, tol)?;
        let mut interior = vec![0.0; d];
        for &i in &simplex {
            for (c, v) in interior.iter_mut().zip(pts.point(i as usize)) {
                *c += v / (d + 1) as f64;
            }
        }
        let mut b = Builder { pts, d, tol, facets: Vec::with_capacity(4 * (d + 1)), interior, epoch: 0 };
        for skip in 0..=d {
            let verts: Vec<u32> = (0..=d).filter(|&k| k != skip).map(|k| simplex[k]).collect();
            // neighbour opposite verts[j] is the facet that omits that vertex
            let neighbors: Vec<u32> = (0..=d).filter(|&k| k != skip).map(|k| k as u32).collect();
            let f = b.make_facet(verts, neighbors)?;
            b.facets.push(f);
        }
        let in_simplex: Vec<bool> = {
            let mut m = vec![false; pts.len()];
            for &i in &simplex {
                m[i as usize] = true;
            }
            m
        };
        let all: Vec<u32> = (0..pts.len() as u32).filter(|&i| !in_simplex[i as usize]).collect();
        let ids: Vec<u32> = (0..=d as u32).collect();
        b.partition(&all, &ids);
        Ok(b)
    }

    fn make_facet(&self, verts: Vec<u32>, neighbors: Vec<u32>) -> Result<Facet> {
        let d = self.d;
        let refs: Vec<&[f64]> = verts.iter().map(|&v| self.pts.point(v as usize)).collect();
        let mut normal = vec![0.0; d];
        hyperplane_normal(&refs, &mut normal);
        let len = norm(&normal);
        if !(len > 0.0) || !len.is_finite() {
            return Err(Error::DegenerateInput { dim: d, rank: d - 1 });
        }
        normal.iter_mut().for_each(|c| *c /= len);
        let mut offset = dot(&normal, refs[0]);
        if dot(&normal, &self.interior) - offset > 0.0 {
            normal.iter_mut().for_each(|c| *c = -*c);
            offset = -offset;
        }
        Ok(Facet {
            verts,
            neighbors,
            normal,
            offset,
            outside: Vec::new(),
            far: u32::MAX,
            far_dist: 0.0,
            alive: true,
            mark: 0,
            visible: false,
        })
    }

    #[inline]
    fn height(&self, f: usize, p: u32) -> f64 {
        let fc = &self.facets[f];
        dot(&fc.normal, self.pts.point(p as usize)) - fc.offset
    }

    /// Hands each point to the first listed facet it lies strictly above;
    /// points above none of them are inside the current hull and dropped.
    fn partition(&mut self, points: &[u32], facets: &[u32]) {
        for &p in points {
            for &f in facets {
                let h = self.height(f as usize, p);
                if h > self.tol {
                    let fc = &mut self.facets[f as usize];
                    fc.outside.push(p);
                    if h > fc.far_dist {
                        fc.far_dist = h;
                        fc.far = p;
                    }
                    break;
                }
            }
        }
    }

    fn run(&mut self) -> Result<()> {
        let mut stack: Vec<u32> =
            (0..self.facets.len() as u32).filter(|&f| !self.facets[f as usize].outside.is_empty()).collect();
        let mut visible: Vec<u32> = Vec::new();
        let mut horizon: Vec<(u32, usize)> = Vec::new();
        let mut ridges: HashMap<Vec<u32>, (u32, usize)> = HashMap::new();
        let mut orphans: Vec<u32> = Vec::new();

        while let Some(start) = stack.pop() {
            let sf = &self.facets[start as usize];
            if !sf.alive || sf.outside.is_empty() {
                continue;
            }
            let apex = sf.far;
            self.epoch += 1;
            let epoch = self.epoch;

            // visible region by flood fill from the conflict facet
            visible.clear();
            horizon.clear();
            visible.push(start);
            {
                let f = &mut self.facets[start as usize];
                f.mark = epoch;
                f.visible = true;
            }
            let mut head = 0;
            while head < visible.len() {
                let f = visible[head] as usize;
                head += 1;
                for k in 0..self.d {
                    let nb = self.facets[f].neighbors[k] as usize;
                    if self.facets[nb].mark != epoch {
                        let vis = self.height(nb, apex) > self.tol;
                        let nf = &mut self.facets[nb];
                        nf.mark = epoch;
                        nf.visible = vis;
                        if vis {
                            visible.push(nb as u32);
                        }
                    }
                    if !self.facets[nb].visible {
                        horizon.push((f as u32, k));
                    }
                }
            }

            // cone from the apex over the horizon ridges
            let first_new = self.facets.len() as u32;
            ridges.clear();
            for &(f, k) in &horizon {
                let old = &self.facets[f as usize];
                let nb = old.neighbors[k];
                let mut verts = old.verts.clone();
                verts[k] = apex;
                let mut neighbors = vec![u32::MAX; self.d];
                neighbors[k] = nb;
                let nf = self.make_facet(verts, neighbors)?;
                let id = self.facets.len() as u32;
                self.facets.push(nf);
                for slot in self.facets[nb as usize].neighbors.iter_mut() {
                    if *slot == f {
                        *slot = id;
                    }
                }
                for j in 0..self.d {
                    if j == k {
                        continue;
                    }
                    let mut key: Vec<u32> = self.facets[id as usize]
                        .verts
                        .iter()
                        .enumerate()
                        .filter(|&(i, _)| i != j)
                        .map(|(_, &v)| v)
                        .collect();
                    key.sort_unstable();
                    match ridges.remove(&key) {
                        Some((other, oslot)) => {
                            self.facets[id as usize].neighbors[j] = other;
                            self.facets[other as usize].neighbors[oslot] = id;
                        }
                        None => {
                            ridges.insert(key, (id, j));
                        }
                    }
                }
            }
            if !ridges.is_empty() {
                return Err(Error::InvalidPolytope(
                    "horizon is not a closed ridge cycle (numerical degeneracy)".into(),
                ));
            }

            orphans.clear();
            for &f in &visible {
                let fc = &mut self.facets[f as usize];
                fc.alive = false;
                orphans.extend(fc.outside.drain(..).filter(|&p| p != apex));
            }
            let new_ids: Vec<u32> = (first_new..self.facets.len() as u32).collect();
            let pts = std::mem::take(&mut orphans);
            self.partition(&pts, &new_ids);
            orphans = pts;
            for &f in &new_ids {
                if !self.facets[f as usize].outside.is_empty() {
                    stack.push(f);
                }
            }
        }
        Ok(())
    }

    fn finish(self) -> Result<Polytope> {
        let alive: Vec<&Facet> = self.facets.iter().filter(|f| f.alive).collect();
        let mut index_of: HashMap<u32, usize> = HashMap::new();
        let mut used: Vec<u32> = alive.iter().flat_map(|f| f.verts.iter().copied()).collect();
        used.sort_unstable();
        used.dedup();
        for (k, &v) in used.iter().enumerate() {
            index_of.insert(v, k);
        }
        let mut vertices = PointSet::with_capacity(self.d, used.len());
        for &v in &used {
            vertices.push_unchecked(self.pts.point(v as usize));
        }
        // renumber facets so adjacency refers to the compacted list
        let mut new_id = vec![usize::MAX; self.facets.len()];
        for (k, (i, _)) in self.facets.iter().enumerate().filter(|(_, f)| f.alive).enumerate() {
            new_id[i] = k;
        }
        let hull_facets: Vec<HullFacet> = alive
            .iter()
            .map(|f| HullFacet {
                verts: f.verts.iter().map(|v| index_of[v]).collect(),
                neighbors: f.neighbors.iter().map(|&n| new_id[n as usize]).collect(),
                normal: f.normal.clone(),
                offset: f.offset,
            })
            .collect();
        Polytope::from_hull(vertices, hull_facets, used.iter().map(|&v| v as usize).collect(), self.tol)
    }
}

/// Picks d+1 affinely independent points greedily: the extremes along the
/// widest axis, then repeatedly the point furthest from the current affine hull.
fn initial_simplex(pts: &PointSet, tol: f64) -> Result<Vec<u32>> {
    let d = pts.dim();
    let n = pts.len();
    if n < d + 1 {
        return Err(Error::DegenerateInput { dim: d, rank: n.saturating_sub(1) });
    }
    let mut best_axis = (0usize, 0usize, 0usize, -1.0f64);
    for k in 0..d {
        let (mut lo, mut hi) = (0usize, 0usize);
        for i in 1..n {
            if pts.point(i)[k] < pts.point(lo)[k] {
                lo = i;
            }
            if pts.point(i)[k] > pts.point(hi)[k] {
                hi = i;
            }
        }
        let ext = pts.point(hi)[k] - pts.point(lo)[k];
        if ext > best_axis.3 {
            best_axis = (k, lo, hi, ext);
        }
    }
    let (_, lo, hi, ext) = best_axis;
    if ext <= tol {
        return Err(Error::DegenerateInput { dim: d, rank: 0 });
    }
    let origin = pts.point(lo).to_vec();
    let mut chosen = vec![lo as u32, hi as u32];
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(d);
    let add_direction = |v: &[f64], basis: &mut Vec<Vec<f64>>| {
        let mut r: Vec<f64> = v.iter().zip(&origin).map(|(a, b)| a - b).collect();
        for b in basis.iter() {
            let c = dot(&r, b);
            r.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
        }
        let l = norm(&r);
        r.iter_mut().for_each(|x| *x /= l);
        basis.push(r);
    };
    add_direction(pts.point(hi), &mut basis);
    let mut resid = vec![0.0; d];
    while chosen.len() < d + 1 {
        let mut best = (usize::MAX, 0.0f64);
        for i in 0..n {
            let p = pts.point(i);
            resid.iter_mut().zip(p).zip(&origin).for_each(|((r, a), b)| *r = a - b);
            for b in &basis {
                let c = dot(&resid, b);
                resid.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
            }
            let h = norm(&resid);
            if h > best.1 {
                best = (i, h);
            }
        }
        if best.1 <= tol {
            return Err(Error::DegenerateInput { dim: d, rank: chosen.len() - 1 });
        }
        chosen.push(best.0 as u32);
        add_direction(pts.point(best.0), &mut basis);
    }
    Ok(chosen)
}
