//! Euclidean distance from a point to a polytope and Hausdorff distance
//! between polytopes.
//!
//! The projection onto the convex hull of the vertices uses Wolfe's
//! minimum-norm-point method: an active set of affinely independent vertices
//! is grown by the Frank-Wolfe vertex and shrunk by line searches towards the
//! affine minimiser. For a current iterate `y` (relative to the query point)
//! every hull point `z` satisfies `|z| >= |y| - gap/|y|` with
//! `gap = |y|² - min_v <y, v>`, so stopping at `gap/|y| <= tol` certifies the
//! returned distance to within `tol`.

use super::linalg::{dot, norm, solve};
use super::polytope::Polytope;
use crate::error::{Error, Result};

/// Default stopping tolerance for [`distance_to_convex`].
pub const PROJECTION_TOLERANCE: f64 = 1e-8;

const MAX_ITERATIONS: usize = 10_000;

/// Result of a projection onto a polytope.
#[derive(Debug, Clone)]
pub struct Projection {
    pub distance: f64,
    pub nearest: Vec<f64>,
    /// certified bound on `distance - true distance`
    pub gap_bound: f64,
    pub iterations: usize,
}

/// Distance from `x` to `p`, certified to within `tol`. Zero when `x` is inside.
pub fn distance_to_convex(x: &[f64], p: &Polytope, tol: f64) -> Result<f64> {
    Ok(project(x, p, tol)?.distance)
}

/// Nearest point of `p` to `x` together with the convergence certificate.
pub fn project(x: &[f64], p: &Polytope, tol: f64) -> Result<Projection> {
    if x.len() != p.dim() {
        return Err(Error::DimensionMismatch { expected: p.dim(), found: x.len() });
    }
    if p.contains(x, 0.0)? {
        return Ok(Projection { distance: 0.0, nearest: x.to_vec(), gap_bound: 0.0, iterations: 0 });
    }
    let d = x.len();
    let rel: Vec<Vec<f64>> = p.vertices().iter().map(|v| v.iter().zip(x).map(|(a, b)| a - b).collect()).collect();
    let (y, weights, iterations, gap) = min_norm_point(&rel, tol)?;
    let dist = norm(&y);
    let mut nearest = vec![0.0; d];
    for (w, v) in weights.iter().zip(p.vertices().iter()) {
        for k in 0..d {
            nearest[k] += w * v[k];
        }
    }
    Ok(Projection { distance: dist, nearest, gap_bound: if dist > 0.0 { gap / dist } else { 0.0 }, iterations })
}

/// Minimum-norm point of conv(points). Returns the point, the convex weights,
/// the iteration count and the final duality gap.
fn min_norm_point(points: &[Vec<f64>], tol: f64) -> Result<(Vec<f64>, Vec<f64>, usize, f64)> {
    let m = points.len();
    let d = points[0].len();
    let start = (0..m).min_by(|&a, &b| dot(&points[a], &points[a]).total_cmp(&dot(&points[b], &points[b]))).unwrap();
    let mut active: Vec<usize> = vec![start];
    let mut lambda: Vec<f64> = vec![1.0];
    let mut y = points[start].clone();
    let mut gap = f64::INFINITY;

    for iter in 1..=MAX_ITERATIONS {
        let yy = dot(&y, &y);
        let (j, ymin) = (0..m).map(|k| (k, dot(&y, &points[k]))).min_by(|a, b| a.1.total_cmp(&b.1)).unwrap();
        gap = yy - ymin;
        let ynorm = yy.sqrt();
        if ynorm == 0.0 || gap <= tol * ynorm || active.contains(&j) {
            if gap > tol * ynorm && ynorm > 0.0 {
                // stalled on an already-active vertex: rounding limits the gap
                if gap > 1e3 * tol * ynorm {
                    return Err(Error::NonConvergence { iterations: iter, gap });
                }
            }
            return Ok((y, expand(&active, &lambda, m), iter, gap.max(0.0)));
        }
        active.push(j);
        lambda.push(0.0);

        // minor cycles: move to the affine minimiser, dropping vertices that
        // would receive non-positive weight
        loop {
            let mu = match affine_minimizer(points, &active) {
                Some(mu) => mu,
                None => {
                    // affinely dependent active set: drop the newest vertex
                    active.pop();
                    lambda.pop();
                    return Err(Error::NonConvergence { iterations: iter, gap });
                }
            };
            if mu.iter().all(|&w| w > 1e-14) {
                lambda = mu;
                break;
            }
            let mut theta = 1.0f64;
            for (l, w) in lambda.iter().zip(&mu) {
                if *w <= 1e-14 && l - w > 0.0 {
                    theta = theta.min(l / (l - w));
                }
            }
            for (l, w) in lambda.iter_mut().zip(&mu) {
                *l += theta * (w - *l);
            }
            let mut k = 0;
            while k < active.len() {
                if lambda[k] <= 1e-14 {
                    active.swap_remove(k);
                    lambda.swap_remove(k);
                } else {
                    k += 1;
                }
            }
            let s: f64 = lambda.iter().sum();
            lambda.iter_mut().for_each(|l| *l /= s);
            if active.len() == 1 {
                lambda[0] = 1.0;
                break;
            }
        }
        y = vec![0.0; d];
        for (&a, &l) in active.iter().zip(&lambda) {
            for c in 0..d {
                y[c] += l * points[a][c];
            }
        }
    }
    Err(Error::NonConvergence { iterations: MAX_ITERATIONS, gap })
}

/// Weights of the minimum-norm point of the affine hull of `active`.
fn affine_minimizer(points: &[Vec<f64>], active: &[usize]) -> Option<Vec<f64>> {
    let k = active.len();
    let n = k + 1;
    let mut a = vec![0.0; n * n];
    let mut b = vec![0.0; n];
    for i in 0..k {
        for j in 0..k {
            a[i * n + j] = dot(&points[active[i]], &points[active[j]]);
        }
        a[i * n + k] = 1.0;
        a[k * n + i] = 1.0;
    }
    b[k] = 1.0;
    solve(&mut a, &mut b, n, 1e-13)?;
    b.truncate(k);
    Some(b)
}

fn expand(active: &[usize], lambda: &[f64], m: usize) -> Vec<f64> {
    let mut w = vec![0.0; m];
    for (&a, &l) in active.iter().zip(lambda) {
        w[a] = l;
    }
    w
}

/// Hausdorff distance between two polytopes: the larger of the two
/// vertex-to-polytope maxima (distance to a convex set is convex, so the
/// maximum over a polytope is attained at a vertex).
pub fn hausdorff_distance(p: &Polytope, q: &Polytope, tol: f64) -> Result<f64> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch { expected: p.dim(), found: q.dim() });
    }
    let mut h = 0.0f64;
    for v in p.vertices().iter() {
        h = h.max(distance_to_convex(v, q, tol)?);
    }
    for v in q.vertices().iter() {
        h = h.max(distance_to_convex(v, p, tol)?);
    }
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::PointSet;
    use approx::assert_relative_eq;

    fn poly(rows: &[[f64; 2]]) -> Polytope {
        Polytope::hull(&PointSet::from_rows(rows).unwrap()).unwrap()
    }

    #[test]
    fn distance_examples() {
        let diamond = poly(&[[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]]);
        assert_eq!(distance_to_convex(&[0.1, 0.2], &diamond, 1e-8).unwrap(), 0.0);
        assert_relative_eq!(distance_to_convex(&[2.0, 0.0], &diamond, 1e-8).unwrap(), 1.0, epsilon = 1e-8);
        let sq = poly(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]);
        assert_relative_eq!(distance_to_convex(&[2.0, 2.0], &sq, 1e-8).unwrap(), 2f64.sqrt(), epsilon = 1e-8);
        // nearest point in the relative interior of an edge
        let pr = project(&[0.5, 3.0], &sq, 1e-10).unwrap();
        assert_relative_eq!(pr.distance, 2.0, epsilon = 1e-10);
        assert_relative_eq!(pr.nearest[0], 0.5, epsilon = 1e-9);
        assert!(pr.gap_bound <= 1e-10);
    }

    #[test]
    fn hausdorff_examples() {
        let sq = poly(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]);
        assert_eq!(hausdorff_distance(&sq, &sq, 1e-8).unwrap(), 0.0);
        let t = 0.37;
        let shifted = poly(&[[t, 0.0], [1.0 + t, 0.0], [1.0 + t, 1.0], [t, 1.0]]);
        assert_relative_eq!(hausdorff_distance(&sq, &shifted, 1e-10).unwrap(), t, epsilon = 1e-9);
        let big = poly(&[[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]]);
        let diamond = poly(&[[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]]);
        let h = hausdorff_distance(&big, &diamond, 1e-10).unwrap();
        assert_relative_eq!(h, 2f64.sqrt() / 2.0, epsilon = 1e-9);
        // oracle: densely sampled boundary of the square against the diamond edges
        let mut oracle = 0.0f64;
        for k in 0..=4000 {
            let s = -1.0 + 2.0 * k as f64 / 4000.0;
            for p in [[s, 1.0], [1.0, s], [s, -1.0], [-1.0, s]] {
                let dd = ((p[0].abs() + p[1].abs() - 1.0) / 2f64.sqrt()).max(0.0);
                oracle = oracle.max(dd);
            }
        }
        assert_relative_eq!(h, oracle, epsilon = 1e-9);
    }

    #[test]
    fn dimension_mismatch() {
        let sq = poly(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]);
        assert!(matches!(distance_to_convex(&[0.0, 0.0, 0.0], &sq, 1e-8), Err(Error::DimensionMismatch { .. })));
    }
}
