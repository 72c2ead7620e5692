use log::warn;
use rand::Rng;
use rand_distr::{Exp1, StandardNormal};

use super::rng::RngStream;
use crate::error::{Error, Result};
use crate::geometry::{BodyKind, ConvexBody, PointSet, Region};

/// Empirical acceptance below which rejection sampling logs a warning.
pub const LOW_ACCEPTANCE: f64 = 1e-3;

/// Direct uniform sampler on a convex body.
///
/// Balls use a Gaussian direction and radius `U^{1/d}`, ellipsoids the image
/// of a ball point, boxes independent coordinates, simplices Dirichlet(1)
/// weights, and polytopes pick a boundary cone with probability proportional
/// to its volume and then sample that simplex.
#[derive(Debug, Clone)]
pub struct UniformSampler {
    dim: usize,
    plan: Plan,
}

#[derive(Debug, Clone)]
enum Plan {
    Ball { center: Vec<f64>, radius: f64 },
    Ellipsoid { center: Vec<f64>, shape: Vec<f64> },
    Box { lower: Vec<f64>, width: Vec<f64> },
    Simplex { vertices: Vec<f64> },
    Cones { apex: Vec<f64>, faces: Vec<f64>, cumulative: Vec<f64> },
}

impl UniformSampler {
    pub fn new(k: &ConvexBody) -> Result<Self> {
        let d = k.dim();
        let plan = match k.kind() {
            BodyKind::Ball { center, radius } => Plan::Ball { center: center.clone(), radius: *radius },
            BodyKind::Ellipsoid(e) => {
                Plan::Ellipsoid { center: e.center().to_vec(), shape: e.shape().transpose().as_slice().to_vec() }
            }
            BodyKind::Box { lower, upper } => {
                Plan::Box { lower: lower.clone(), width: upper.iter().zip(lower).map(|(u, l)| u - l).collect() }
            }
            BodyKind::Simplex(p) => Plan::Simplex { vertices: p.vertices().as_flat().to_vec() },
            BodyKind::Poly(p) => {
                let verts = p.vertices();
                let mut faces = Vec::with_capacity(p.boundary_simplices().len() * d * d);
                for s in p.boundary_simplices() {
                    for &v in s {
                        faces.extend_from_slice(verts.point(v));
                    }
                }
                let mut acc = 0.0;
                let cumulative = p
                    .cone_volumes()
                    .into_iter()
                    .map(|v| {
                        acc += v;
                        acc
                    })
                    .collect::<Vec<_>>();
                if !(acc > 0.0) {
                    return Err(Error::InvalidPolytope("polytope has zero volume".into()));
                }
                Plan::Cones { apex: p.interior_point().coords().to_vec(), faces, cumulative }
            }
        };
        Ok(UniformSampler { dim: d, plan })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Writes one uniform point into `out` (length `dim`).
    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        let d = self.dim;
        match &self.plan {
            Plan::Ball { center, radius } => {
                unit_ball_point(rng, out);
                for k in 0..d {
                    out[k] = center[k] + radius * out[k];
                }
            }
            Plan::Ellipsoid { center, shape } => {
                let mut stack = [0.0; 8];
                let mut heap;
                let u = if d <= 8 {
                    &mut stack[..d]
                } else {
                    heap = vec![0.0; d];
                    &mut heap[..]
                };
                unit_ball_point(rng, u);
                for r in 0..d {
                    out[r] = center[r] + (0..d).map(|c| shape[r * d + c] * u[c]).sum::<f64>();
                }
            }
            Plan::Box { lower, width } => {
                for k in 0..d {
                    out[k] = lower[k] + width[k] * rng.random::<f64>();
                }
            }
            Plan::Simplex { vertices } => dirichlet_combination(rng, vertices, None, d, out),
            Plan::Cones { apex, faces, cumulative } => {
                let total = *cumulative.last().expect("non-empty triangulation");
                let u = rng.random::<f64>() * total;
                let i = cumulative.partition_point(|&c| c <= u).min(cumulative.len() - 1);
                dirichlet_combination(rng, &faces[i * d * d..(i + 1) * d * d], Some(apex), d, out);
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> PointSet {
        let mut out = PointSet::with_capacity(self.dim, n);
        let mut x = vec![0.0; self.dim];
        for _ in 0..n {
            self.sample_into(rng, &mut x);
            out.push_unchecked(&x);
        }
        out
    }
}

/// Uniform point in the Euclidean unit ball.
fn unit_ball_point<R: Rng + ?Sized>(rng: &mut R, out: &mut [f64]) {
    let d = out.len();
    if d == 2 {
        // rejection from the square accepts with probability π/4
        loop {
            let x = 2.0 * rng.random::<f64>() - 1.0;
            let y = 2.0 * rng.random::<f64>() - 1.0;
            if x * x + y * y <= 1.0 {
                out[0] = x;
                out[1] = y;
                return;
            }
        }
    }
    let mut r2 = 0.0;
    while !(r2 > 0.0) {
        r2 = 0.0;
        for v in out.iter_mut() {
            *v = rng.sample(StandardNormal);
            r2 += *v * *v;
        }
    }
    let scale = rng.random::<f64>().powf(1.0 / d as f64) / r2.sqrt();
    out.iter_mut().for_each(|v| *v *= scale);
}

/// Dirichlet(1, …, 1) combination of `rows` (row-major, `dim` columns) plus
/// an optional extra vertex.
fn dirichlet_combination<R: Rng + ?Sized>(
    rng: &mut R,
    rows: &[f64],
    extra: Option<&Vec<f64>>,
    dim: usize,
    out: &mut [f64],
) {
    out.iter_mut().for_each(|v| *v = 0.0);
    let mut total = 0.0;
    for row in rows.chunks_exact(dim) {
        let w: f64 = rng.sample(Exp1);
        total += w;
        out.iter_mut().zip(row).for_each(|(o, r)| *o += w * r);
    }
    if let Some(v) = extra {
        let w: f64 = rng.sample(Exp1);
        total += w;
        out.iter_mut().zip(v).for_each(|(o, r)| *o += w * r);
    }
    out.iter_mut().for_each(|o| *o /= total);
}

/// `n` i.i.d. uniform points on `k`.
pub fn sample_uniform(k: &ConvexBody, n: usize, rng: &RngStream) -> Result<PointSet> {
    Ok(UniformSampler::new(k)?.sample(n, &mut rng.rng()))
}

/// Rejection sampling from the bounding box of `region`. Logs a warning when
/// the empirical acceptance rate falls below [`LOW_ACCEPTANCE`].
pub fn sample_by_rejection<R: Rng + ?Sized>(region: &dyn Region, n: usize, rng: &mut R) -> Result<PointSet> {
    let (lo, hi) = region.bounding_box().ok_or(Error::NoBoundingBox)?;
    let d = region.dim();
    let mut out = PointSet::with_capacity(d, n);
    let mut x = vec![0.0; d];
    let mut proposals = 0u64;
    while out.len() < n {
        proposals += 1;
        for k in 0..d {
            x[k] = lo[k] + (hi[k] - lo[k]) * rng.random::<f64>();
        }
        if region.contains_point(&x) {
            out.push_unchecked(&x);
        }
    }
    if n > 0 {
        warn_if_low_acceptance(n as u64, proposals);
    }
    Ok(out)
}

pub(crate) fn warn_if_low_acceptance(accepted: u64, proposals: u64) {
    let rate = accepted as f64 / proposals as f64;
    if rate < LOW_ACCEPTANCE {
        warn!("low acceptance rate {rate:.2e} ({accepted}/{proposals}); precondition the body with its John ellipsoid");
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    fn all_inside(k: &ConvexBody, pts: &PointSet) {
        for p in pts.iter() {
            assert!(k.contains(p, 1e-9).unwrap(), "{p:?} outside {}", k.kind_name());
        }
    }

    #[test]
    fn empty_request() {
        let k = ConvexBody::unit_ball(3).unwrap();
        assert!(sample_uniform(&k, 0, &RngStream::new(0, 0)).unwrap().is_empty());
    }

    #[test]
    fn every_kind_stays_inside() {
        let rot = ConvexBody::unit_cube(3).unwrap().as_polytope().unwrap();
        let bodies = [
            ConvexBody::unit_ball(2).unwrap(),
            ConvexBody::unit_ball(4).unwrap(),
            ConvexBody::unit_cube(3).unwrap(),
            ConvexBody::standard_simplex(3).unwrap(),
            ConvexBody::ellipsoid(vec![1.0, 2.0], DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.0, 0.3])).unwrap(),
            ConvexBody::poly(rot).unwrap(),
        ];
        for (i, k) in bodies.iter().enumerate() {
            let pts = sample_uniform(k, 2000, &RngStream::new(5, i as u64)).unwrap();
            assert_eq!(pts.len(), 2000);
            all_inside(k, &pts);
        }
    }

    #[test]
    fn square_mean_is_central() {
        let k = ConvexBody::unit_cube(2).unwrap();
        let n = 100_000;
        let pts = sample_uniform(&k, n, &RngStream::new(9, 0)).unwrap();
        let se = (1.0f64 / 12.0).sqrt() / (n as f64).sqrt();
        for c in 0..2 {
            let mean = pts.iter().map(|p| p[c]).sum::<f64>() / n as f64;
            assert!((mean - 0.5).abs() <= 3.0 * se);
        }
    }

    #[test]
    fn polytope_cones_are_volume_weighted() {
        // half of the mass of [0,1]^2 lies left of x = 0.5
        let k = ConvexBody::poly(ConvexBody::unit_cube(2).unwrap().as_polytope().unwrap()).unwrap();
        let n = 50_000;
        let pts = sample_uniform(&k, n, &RngStream::new(3, 0)).unwrap();
        let left = pts.iter().filter(|p| p[0] < 0.5 && p[1] < 0.25).count() as f64 / n as f64;
        assert!((left - 0.125).abs() < 3.0 * (0.125f64 * 0.875 / n as f64).sqrt() + 1e-3);
    }

    #[test]
    fn rejection_matches_membership() {
        let k = ConvexBody::standard_simplex(2).unwrap();
        let pts = sample_by_rejection(&k, 500, &mut RngStream::new(1, 0).rng()).unwrap();
        all_inside(&k, &pts);
    }
}
