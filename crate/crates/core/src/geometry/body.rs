//! Host convex bodies with exact membership, volume and boundary distance.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::hull::convex_hull_default;
use super::linalg::{binomial, dot, norm, unit_ball_volume};
use super::point::PointSet;
use super::polytope::Polytope;
use crate::error::{Error, Result};

/// Relative tolerance for membership tests on analytic bodies.
pub const BODY_TOLERANCE: f64 = 1e-12;

/// Solid ellipsoid `{center + shape · u : |u| <= 1}`.
#[derive(Debug, Clone)]
pub struct Ellipsoid {
    center: Vec<f64>,
    shape: DMatrix<f64>,
    shape_inv: DMatrix<f64>,
    /// semi-axes of `shape · shapeᵀ` with their directions as matrix columns
    semi_axes: Vec<f64>,
    axes: DMatrix<f64>,
}

impl Ellipsoid {
    pub fn new(center: Vec<f64>, shape: DMatrix<f64>) -> Result<Self> {
        let d = center.len();
        if shape.nrows() != d || shape.ncols() != d {
            return Err(Error::DimensionMismatch { expected: d, found: shape.nrows() });
        }
        let det = shape.determinant();
        if !(det.abs() > 1e-300) {
            return Err(Error::InvalidArgument("ellipsoid shape matrix is singular".into()));
        }
        let shape_inv = shape
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::InvalidArgument("ellipsoid shape matrix is singular".into()))?;
        let q = &shape * shape.transpose();
        let eig = SymmetricEigen::new(q);
        let semi_axes = eig.eigenvalues.iter().map(|l| l.max(0.0).sqrt()).collect();
        Ok(Ellipsoid { center, shape, shape_inv, semi_axes, axes: eig.eigenvectors })
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn shape(&self) -> &DMatrix<f64> {
        &self.shape
    }

    pub fn semi_axes(&self) -> &[f64] {
        &self.semi_axes
    }

    /// |shape⁻¹ (x - c)|
    pub fn gauge(&self, x: &[f64]) -> f64 {
        let d = self.center.len();
        let mut s = 0.0;
        for r in 0..d {
            let acc: f64 = (0..d).map(|c| self.shape_inv[(r, c)] * (x[c] - self.center[c])).sum();
            s += acc * acc;
        }
        s.sqrt()
    }

    /// Support function `h(u) = <c, u> + |shapeᵀ u|`.
    pub fn support(&self, u: &[f64]) -> f64 {
        let d = self.center.len();
        let mut s = 0.0;
        for c in 0..d {
            let acc: f64 = (0..d).map(|r| self.shape[(r, c)] * u[r]).sum();
            s += acc * acc;
        }
        dot(&self.center, u) + s.sqrt()
    }

    /// Distance from an interior point to the boundary, by bisection on the
    /// Lagrange multiplier of the nearest-point problem in the principal frame.
    fn boundary_distance(&self, x: &[f64]) -> f64 {
        let d = self.center.len();
        let diff = DVector::from_iterator(d, x.iter().zip(&self.center).map(|(a, b)| a - b));
        let y: Vec<f64> = (self.axes.transpose() * diff).iter().map(|v| v.abs()).collect();
        let a = &self.semi_axes;
        let a_min = a.iter().cloned().fold(f64::INFINITY, f64::min);
        let lo_t = -a_min * a_min;
        let f = |t: f64| -> f64 {
            y.iter()
                .zip(a)
                .map(|(yi, ai)| {
                    let den = ai * ai + t;
                    if *yi == 0.0 {
                        0.0
                    } else {
                        (ai * yi / den).powi(2)
                    }
                })
                .sum::<f64>()
                - 1.0
        };
        let tie = 1e-12 * a_min * a_min;
        let min_axes: Vec<usize> = (0..d).filter(|&i| a[i] * a[i] - a_min * a_min <= tie).collect();
        let degenerate = min_axes.iter().all(|&i| y[i] == 0.0);
        if degenerate {
            // limit of F at the pole, excluding the (zero) min-axis terms
            let g: f64 = (0..d)
                .filter(|i| !min_axes.contains(i))
                .map(|i| (a[i] * y[i] / (a[i] * a[i] + lo_t)).powi(2))
                .sum::<f64>()
                - 1.0;
            if g <= 0.0 {
                let mut dist2 = 0.0;
                let mut used = 0.0;
                for i in (0..d).filter(|i| !min_axes.contains(i)) {
                    let zi = a[i] * a[i] * y[i] / (a[i] * a[i] + lo_t);
                    dist2 += (zi - y[i]).powi(2);
                    used += (zi / a[i]).powi(2);
                }
                let rem = (1.0 - used).max(0.0);
                dist2 += a_min * a_min * rem;
                return dist2.sqrt();
            }
        }
        let (mut lo, mut hi) = (lo_t, 0.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if f(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let t = 0.5 * (lo + hi);
        y.iter()
            .zip(a)
            .map(|(yi, ai)| {
                let zi = ai * ai * yi / (ai * ai + t);
                (zi - yi).powi(2)
            })
            .sum::<f64>()
            .sqrt()
    }
}

#[derive(Debug, Clone)]
pub enum BodyKind {
    Ball {
        center: Vec<f64>,
        radius: f64,
    },
    Box {
        lower: Vec<f64>,
        upper: Vec<f64>,
    },
    /// the simplex as a polytope whose vertices are the d+1 corners
    Simplex(Polytope),
    Ellipsoid(Ellipsoid),
    Poly(Polytope),
}

/// A full-dimensional convex body hosting the samples.
#[derive(Debug, Clone)]
pub struct ConvexBody {
    dim: usize,
    kind: BodyKind,
}

impl ConvexBody {
    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        let dim = center.len();
        check_dim(dim)?;
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidArgument(format!("ball radius must be positive, got {radius}")));
        }
        Ok(ConvexBody { dim, kind: BodyKind::Ball { center, radius } })
    }

    pub fn unit_ball(dim: usize) -> Result<Self> {
        Self::ball(vec![0.0; dim], 1.0)
    }

    pub fn cuboid(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        let dim = lower.len();
        check_dim(dim)?;
        if upper.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: upper.len() });
        }
        if lower.iter().zip(&upper).any(|(l, u)| !(u > l)) {
            return Err(Error::InvalidArgument("box needs lower < upper in every coordinate".into()));
        }
        Ok(ConvexBody { dim, kind: BodyKind::Box { lower, upper } })
    }

    /// `[0, 1]^d`
    pub fn unit_cube(dim: usize) -> Result<Self> {
        Self::cuboid(vec![0.0; dim], vec![1.0; dim])
    }

    pub fn simplex(vertices: &PointSet) -> Result<Self> {
        let dim = vertices.dim();
        check_dim(dim)?;
        if vertices.len() != dim + 1 {
            return Err(Error::InvalidArgument(format!(
                "a simplex in R^{dim} needs {} vertices, got {}",
                dim + 1,
                vertices.len()
            )));
        }
        let poly = convex_hull_default(vertices)?;
        Ok(ConvexBody { dim, kind: BodyKind::Simplex(poly) })
    }

    /// `conv{0, e_1, ..., e_d}`
    pub fn standard_simplex(dim: usize) -> Result<Self> {
        let mut v = PointSet::with_capacity(dim, dim + 1);
        v.push_unchecked(&vec![0.0; dim]);
        for k in 0..dim {
            let mut e = vec![0.0; dim];
            e[k] = 1.0;
            v.push_unchecked(&e);
        }
        Self::simplex(&v)
    }

    pub fn ellipsoid(center: Vec<f64>, shape: DMatrix<f64>) -> Result<Self> {
        let dim = center.len();
        check_dim(dim)?;
        Ok(ConvexBody { dim, kind: BodyKind::Ellipsoid(Ellipsoid::new(center, shape)?) })
    }

    pub fn poly(p: Polytope) -> Result<Self> {
        check_dim(p.dim())?;
        Ok(ConvexBody { dim: p.dim(), kind: BodyKind::Poly(p) })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &BodyKind {
        &self.kind
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            BodyKind::Ball { .. } => "ball",
            BodyKind::Box { .. } => "box",
            BodyKind::Simplex(_) => "simplex",
            BodyKind::Ellipsoid(_) => "ellipsoid",
            BodyKind::Poly(_) => "polytope",
        }
    }

    /// Bodies with a C² boundary (ball and ellipsoid).
    pub fn is_smooth(&self) -> bool {
        matches!(self.kind, BodyKind::Ball { .. } | BodyKind::Ellipsoid(_))
    }

    /// Polytope view for box, simplex and explicit polytopes.
    pub fn as_polytope(&self) -> Option<Polytope> {
        match &self.kind {
            BodyKind::Simplex(p) | BodyKind::Poly(p) => Some(p.clone()),
            BodyKind::Box { lower, upper } => {
                let d = self.dim;
                let mut corners = PointSet::with_capacity(d, 1 << d);
                for m in 0..(1usize << d) {
                    let c: Vec<f64> = (0..d).map(|k| if m >> k & 1 == 1 { upper[k] } else { lower[k] }).collect();
                    corners.push_unchecked(&c);
                }
                convex_hull_default(&corners).ok()
            }
            _ => None,
        }
    }

    pub fn volume(&self) -> f64 {
        match &self.kind {
            BodyKind::Ball { radius, .. } => unit_ball_volume(self.dim) * radius.powi(self.dim as i32),
            BodyKind::Box { lower, upper } => lower.iter().zip(upper).map(|(l, u)| u - l).product(),
            BodyKind::Simplex(p) | BodyKind::Poly(p) => p.volume().unwrap_or(f64::NAN),
            BodyKind::Ellipsoid(e) => unit_ball_volume(self.dim) * e.shape.determinant().abs(),
        }
    }

    /// Boundary measure; for ellipsoids this is the (larger) area of the
    /// sphere of the largest semi-axis.
    pub fn surface_area_bound(&self) -> f64 {
        let d = self.dim;
        match &self.kind {
            BodyKind::Ball { radius, .. } => d as f64 * unit_ball_volume(d) * radius.powi(d as i32 - 1),
            BodyKind::Box { lower, upper } => {
                let sides: Vec<f64> = lower.iter().zip(upper).map(|(l, u)| u - l).collect();
                let vol: f64 = sides.iter().product();
                2.0 * sides.iter().map(|s| vol / s).sum::<f64>()
            }
            BodyKind::Simplex(p) | BodyKind::Poly(p) => p.surface_area(),
            BodyKind::Ellipsoid(e) => {
                let a = e.semi_axes.iter().cloned().fold(0.0, f64::max);
                d as f64 * unit_ball_volume(d) * a.powi(d as i32 - 1)
            }
        }
    }

    /// Largest distance from an interior point to the boundary. For explicit
    /// polytopes this returns the upper bound `d·|P| / surface(P)`.
    pub fn inradius(&self) -> f64 {
        match &self.kind {
            BodyKind::Ball { radius, .. } => *radius,
            BodyKind::Box { lower, upper } => {
                lower.iter().zip(upper).map(|(l, u)| 0.5 * (u - l)).fold(f64::INFINITY, f64::min)
            }
            BodyKind::Ellipsoid(e) => e.semi_axes.iter().cloned().fold(f64::INFINITY, f64::min),
            BodyKind::Simplex(p) | BodyKind::Poly(p) => {
                self.dim as f64 * p.volume().unwrap_or(f64::NAN) / p.surface_area()
            }
        }
    }

    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        match &self.kind {
            BodyKind::Ball { center, radius } => {
                (center.iter().map(|c| c - radius).collect(), center.iter().map(|c| c + radius).collect())
            }
            BodyKind::Box { lower, upper } => (lower.clone(), upper.clone()),
            BodyKind::Simplex(p) | BodyKind::Poly(p) => p.bounding_box(),
            BodyKind::Ellipsoid(e) => {
                let d = self.dim;
                let half: Vec<f64> =
                    (0..d).map(|r| (0..d).map(|c| e.shape[(r, c)].powi(2)).sum::<f64>().sqrt()).collect();
                (
                    e.center.iter().zip(&half).map(|(c, h)| c - h).collect(),
                    e.center.iter().zip(&half).map(|(c, h)| c + h).collect(),
                )
            }
        }
    }

    /// Length scale used to make tolerances relative.
    pub fn scale(&self) -> f64 {
        let (lo, hi) = self.bounding_box();
        lo.iter().zip(&hi).map(|(l, h)| h - l).fold(0.0, f64::max)
    }

    /// Membership with absolute slack `tol`.
    pub fn contains(&self, x: &[f64], tol: f64) -> Result<bool> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: x.len() });
        }
        Ok(self.contains_unchecked(x, tol))
    }

    #[inline]
    pub(crate) fn contains_unchecked(&self, x: &[f64], tol: f64) -> bool {
        match &self.kind {
            BodyKind::Ball { center, radius } => {
                let r = radius + tol;
                super::linalg::dist2(x, center) <= r * r
            }
            BodyKind::Box { lower, upper } => {
                x.iter().zip(lower.iter().zip(upper)).all(|(v, (l, u))| *v >= l - tol && *v <= u + tol)
            }
            BodyKind::Simplex(p) | BodyKind::Poly(p) => p.contains_unchecked(x, tol),
            BodyKind::Ellipsoid(e) => {
                let a_min = e.semi_axes.iter().cloned().fold(f64::INFINITY, f64::min);
                e.gauge(x) <= 1.0 + tol / a_min
            }
        }
    }

    /// Distance from `x ∈ K` to the boundary of `K`.
    pub fn boundary_distance(&self, x: &[f64]) -> Result<f64> {
        let tol = BODY_TOLERANCE * self.scale();
        if !self.contains(x, tol)? {
            return Err(Error::OutsideBody);
        }
        Ok(self.boundary_distance_unchecked(x).max(0.0))
    }

    pub(crate) fn boundary_distance_unchecked(&self, x: &[f64]) -> f64 {
        match &self.kind {
            BodyKind::Ball { center, radius } => {
                let r: f64 = x.iter().zip(center).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
                radius - r
            }
            BodyKind::Box { lower, upper } => x
                .iter()
                .zip(lower.iter().zip(upper))
                .map(|(v, (l, u))| (v - l).min(u - v))
                .fold(f64::INFINITY, f64::min),
            BodyKind::Simplex(p) | BodyKind::Poly(p) => {
                p.facets().iter().map(|f| f.slack(x)).fold(f64::INFINITY, f64::min)
            }
            BodyKind::Ellipsoid(e) => e.boundary_distance(x),
        }
    }

    /// Support function `h_K(u) = max_{x∈K} <x, u>`.
    pub fn support(&self, u: &[f64]) -> f64 {
        match &self.kind {
            BodyKind::Ball { center, radius } => dot(center, u) + radius * norm(u),
            BodyKind::Box { lower, upper } => {
                u.iter().zip(lower.iter().zip(upper)).map(|(ui, (l, h))| (ui * l).max(ui * h)).sum()
            }
            BodyKind::Simplex(p) | BodyKind::Poly(p) => {
                p.vertices().iter().map(|v| dot(v, u)).fold(f64::NEG_INFINITY, f64::max)
            }
            BodyKind::Ellipsoid(e) => e.support(u),
        }
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim < 2 {
        return Err(Error::InvalidArgument(format!("bodies live in R^d with d >= 2, got {dim}")));
    }
    Ok(())
}

/// ∫_K min(rho0, dist(x, ∂K))^gamma dx for the ball of radius `r` in R^d,
/// via the radial layer decomposition and a binomial expansion.
pub(crate) fn ball_margin_integral(d: usize, r: f64, gamma: f64, rho0: f64) -> f64 {
    let bd = unit_ball_volume(d);
    let s_max = rho0.min(r);
    // inner core where the weight saturates at rho0
    let core = if rho0 < r { rho0.powf(gamma) * bd * (r - rho0).powi(d as i32) } else { 0.0 };
    // shell: s = r - |x| in [0, s_max], area element d·β_d·(r - s)^{d-1}
    let mut shell = 0.0;
    for k in 0..d {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        shell += sign * binomial(d - 1, k) * r.powi((d - 1 - k) as i32) * s_max.powf(gamma + k as f64 + 1.0)
            / (gamma + k as f64 + 1.0);
    }
    core + d as f64 * bd * shell
}
