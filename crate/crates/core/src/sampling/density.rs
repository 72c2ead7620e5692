use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::rng::RngStream;
use super::uniform::{warn_if_low_acceptance, UniformSampler};
use crate::error::{Error, Result};
use crate::geometry::linalg::unit_ball_volume;
use crate::geometry::{ball_margin_integral, convex_hull_default, BodyKind, ConvexBody, PointSet, BODY_TOLERANCE};

/// Monte Carlo points used for normalising constants without a closed form.
pub const NORMALIZATION_POINTS: usize = 1_000_000;
const NORMALIZATION_STREAM: RngStream = RngStream { seed: 0x6d61_7267_696e_5a00, stream_id: 0 };

/// Shape of a density on its support body.
#[derive(Debug, Clone)]
pub enum DensityKind {
    Uniform,
    /// `f ∝ min(rho0, dist(x, ∂K))^gamma`
    MarginPower {
        gamma: f64,
        rho0: f64,
    },
    /// Law of the first `d` coordinates of a uniform point in `source ⊂ R^D`.
    Projection {
        ambient_dim: usize,
        source: ConvexBody,
    },
}

/// Normalising constant with its Monte Carlo standard error (zero when exact).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Normalization {
    pub z: f64,
    pub stderr: f64,
}

/// Slow-decay lower bound `f >= c · min(rho0, dist(x, ∂K))^gamma` and the
/// margin parameters it implies: `|{f <= t}| <= L t^alpha` for `t <= t0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarginParams {
    pub gamma: f64,
    pub rho0: f64,
    pub c: f64,
    /// Upper bound on the surface area of the support.
    pub kappa: f64,
    /// `1 / gamma`
    pub alpha: f64,
    /// `kappa / c^{1/gamma}`
    pub l: f64,
    /// `c · rho0^gamma`
    pub t0: f64,
}

impl MarginParams {
    pub fn from_slow_decay(gamma: f64, rho0: f64, c: f64, kappa: f64) -> Self {
        MarginParams {
            gamma,
            rho0,
            c,
            kappa,
            alpha: 1.0 / gamma,
            l: kappa / c.powf(1.0 / gamma),
            t0: c * rho0.powf(gamma),
        }
    }

    /// Largest missing mass for which the volume bound applies: `t0^{alpha+1}`.
    pub fn premise_threshold(&self) -> f64 {
        self.t0.powf(self.alpha + 1.0)
    }

    /// `(L + 1) · d_f^{alpha / (alpha + 1)}`
    pub fn volume_bound(&self, missing_mass: f64) -> f64 {
        (self.l + 1.0) * missing_mass.max(0.0).powf(self.alpha / (self.alpha + 1.0))
    }
}

/// A bounded density on a convex body.
#[derive(Debug, Clone)]
pub struct DensitySpec {
    support: ConvexBody,
    kind: DensityKind,
    bound_m: f64,
    normalization: Option<Normalization>,
    margin: Option<MarginParams>,
}

impl DensitySpec {
    pub fn uniform(support: ConvexBody) -> Self {
        let bound_m = 1.0 / support.volume();
        DensitySpec { support, kind: DensityKind::Uniform, bound_m, normalization: None, margin: None }
    }

    /// `f ∝ min(rho0, dist(x, ∂K))^gamma`. The constant is exact for balls and
    /// estimated from [`NORMALIZATION_POINTS`] uniform points otherwise.
    pub fn margin_power(support: ConvexBody, gamma: f64, rho0: f64) -> Result<Self> {
        if !(gamma >= 0.0 && gamma.is_finite()) {
            return Err(Error::InvalidArgument(format!("gamma must be finite and >= 0, got {gamma}")));
        }
        if !(rho0 > 0.0) {
            return Err(Error::InvalidArgument(format!("rho0 must be positive, got {rho0}")));
        }
        if gamma == 0.0 {
            let mut spec = Self::uniform(support);
            spec.kind = DensityKind::MarginPower { gamma, rho0 };
            return Ok(spec);
        }
        let norm = margin_normalization(&support, gamma, rho0)?;
        let cap = rho0.min(support.inradius());
        // sup f with Z lowered by three standard errors
        let bound_m = cap.powf(gamma) / (norm.z - 3.0 * norm.stderr);
        let margin = MarginParams::from_slow_decay(gamma, rho0, 1.0 / norm.z, support.surface_area_bound());
        Ok(DensitySpec {
            support,
            kind: DensityKind::MarginPower { gamma, rho0 },
            bound_m,
            normalization: Some(norm),
            margin: Some(margin),
        })
    }

    /// Projection of the uniform law on `source ⊂ R^D` onto its first `d`
    /// coordinates. Balls and boxes have closed-form densities; other sources
    /// are rejected.
    ///
    /// For a ball of radius `R` the slow-decay constant is
    /// `c = R^γ β_{D-d} / Vol(source)` with `γ = (D - d) / 2`.
    pub fn projection(source: ConvexBody, d: usize) -> Result<Self> {
        let big_d = source.dim();
        if !(2 <= d && d < big_d) {
            return Err(Error::InvalidArgument(format!("projection needs 2 <= d < D, got d = {d}, D = {big_d}")));
        }
        let support = projected_body(&source, d)?;
        let (bound_m, margin) = match source.kind() {
            BodyKind::Ball { radius, .. } => {
                let gamma = (big_d - d) as f64 / 2.0;
                let c = radius.powf(gamma) * unit_ball_volume(big_d - d) / source.volume();
                let m = unit_ball_volume(big_d - d) * radius.powi((big_d - d) as i32) / source.volume();
                (m, Some(MarginParams::from_slow_decay(gamma, *radius, c, support.surface_area_bound())))
            }
            BodyKind::Box { .. } => (1.0 / support.volume(), None),
            _ => return Err(Error::Unsupported(format!("projected density of a {}", source.kind_name()))),
        };
        Ok(DensitySpec {
            support,
            kind: DensityKind::Projection { ambient_dim: big_d, source },
            bound_m,
            normalization: None,
            margin,
        })
    }

    pub fn support(&self) -> &ConvexBody {
        &self.support
    }

    pub fn kind(&self) -> &DensityKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.support.dim()
    }

    /// Essential supremum of the density (exact, or a conservative bound).
    pub fn bound_m(&self) -> f64 {
        self.bound_m
    }

    pub fn normalization(&self) -> Option<Normalization> {
        self.normalization
    }

    pub fn margin_params(&self) -> Option<MarginParams> {
        self.margin
    }

    /// True when `f = 1/|K|` on the support.
    pub fn is_uniform(&self) -> bool {
        match &self.kind {
            DensityKind::Uniform => true,
            DensityKind::MarginPower { gamma, .. } => *gamma == 0.0,
            DensityKind::Projection { source, .. } => matches!(source.kind(), BodyKind::Box { .. }),
        }
    }

    pub fn name(&self) -> String {
        match &self.kind {
            DensityKind::Uniform => format!("uniform/{}", self.support.kind_name()),
            DensityKind::MarginPower { gamma, rho0 } => {
                format!("margin(gamma={gamma},rho0={rho0})/{}", self.support.kind_name())
            }
            DensityKind::Projection { ambient_dim, source } => {
                format!("projection({}^{ambient_dim}->R^{})", source.kind_name(), self.dim())
            }
        }
    }

    pub fn sampler(&self) -> Result<DensitySampler> {
        let mode = match &self.kind {
            DensityKind::Uniform => Mode::Uniform(UniformSampler::new(&self.support)?),
            DensityKind::MarginPower { gamma, .. } if *gamma == 0.0 => {
                Mode::Uniform(UniformSampler::new(&self.support)?)
            }
            DensityKind::MarginPower { gamma, rho0 } => Mode::Margin {
                base: UniformSampler::new(&self.support)?,
                body: Box::new(self.support.clone()),
                gamma: *gamma,
                rho0: *rho0,
                cap: rho0.min(self.support.inradius()),
            },
            DensityKind::Projection { source, .. } => Mode::Projection { base: UniformSampler::new(source)? },
        };
        Ok(DensitySampler { dim: self.dim(), mode })
    }

    /// `n` i.i.d. draws from the density.
    pub fn sample(&self, n: usize, rng: &RngStream) -> Result<PointSet> {
        Ok(self.sampler()?.sample(n, &mut rng.rng()).0)
    }
}

/// Evaluates the density at `x`.
pub fn density_eval(spec: &DensitySpec, x: &[f64]) -> Result<f64> {
    if x.len() != spec.dim() {
        return Err(Error::DimensionMismatch { expected: spec.dim(), found: x.len() });
    }
    let k = &spec.support;
    if !k.contains_unchecked(x, BODY_TOLERANCE * k.scale()) {
        return Err(Error::OutsideSupport);
    }
    match &spec.kind {
        DensityKind::Uniform => Ok(1.0 / k.volume()),
        DensityKind::MarginPower { gamma, .. } if *gamma == 0.0 => Ok(1.0 / k.volume()),
        DensityKind::MarginPower { gamma, rho0 } => {
            let z = spec.normalization.expect("margin densities carry Z").z;
            Ok(rho0.min(k.boundary_distance_unchecked(x)).powf(*gamma) / z)
        }
        DensityKind::Projection { ambient_dim, source } => match source.kind() {
            BodyKind::Ball { center, radius } => {
                let r2: f64 = x.iter().zip(center).map(|(a, c)| (a - c).powi(2)).sum();
                let codim = ambient_dim - x.len();
                let chord = unit_ball_volume(codim) * (radius * radius - r2).max(0.0).powf(codim as f64 / 2.0);
                Ok(chord / source.volume())
            }
            BodyKind::Box { .. } => Ok(1.0 / k.volume()),
            _ => Err(Error::Unsupported(format!("projected density of a {}", source.kind_name()))),
        },
    }
}

/// Sampler for a [`DensitySpec`], reusable across replicates.
#[derive(Debug, Clone)]
pub struct DensitySampler {
    dim: usize,
    mode: Mode,
}

#[derive(Debug, Clone)]
enum Mode {
    Uniform(UniformSampler),
    Margin { base: UniformSampler, body: Box<ConvexBody>, gamma: f64, rho0: f64, cap: f64 },
    Projection { base: UniformSampler },
}

impl DensitySampler {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Writes one draw into `out`; returns the number of proposals used.
    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) -> u64 {
        match &self.mode {
            Mode::Uniform(u) => {
                u.sample_into(rng, out);
                1
            }
            Mode::Margin { base, body, gamma, rho0, cap } => {
                let mut proposals = 0;
                loop {
                    proposals += 1;
                    base.sample_into(rng, out);
                    let rho = rho0.min(body.boundary_distance_unchecked(out));
                    let w = if *gamma == 1.0 { rho / cap } else { (rho / cap).powf(*gamma) };
                    if rng.random::<f64>() < w {
                        return proposals;
                    }
                }
            }
            Mode::Projection { base } => {
                let big_d = base.dim();
                let mut stack = [0.0; 16];
                let mut heap;
                let y = if big_d <= 16 {
                    &mut stack[..big_d]
                } else {
                    heap = vec![0.0; big_d];
                    &mut heap[..]
                };
                base.sample_into(rng, y);
                out.copy_from_slice(&y[..self.dim]);
                1
            }
        }
    }

    /// `n` draws and the total number of proposals.
    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> (PointSet, u64) {
        let mut pts = PointSet::with_capacity(self.dim, n);
        let mut x = vec![0.0; self.dim];
        let mut proposals = 0;
        for _ in 0..n {
            proposals += self.sample_into(rng, &mut x);
            pts.push_unchecked(&x);
        }
        if n > 0 && matches!(self.mode, Mode::Margin { .. }) {
            warn_if_low_acceptance(n as u64, proposals);
        }
        (pts, proposals)
    }
}

/// Draws from the margin-power density together with its parameters.
#[derive(Debug, Clone)]
pub struct MarginSample {
    pub points: PointSet,
    /// `None` for `gamma = 0`, where the law is uniform.
    pub params: Option<MarginParams>,
    pub proposals: u64,
    pub normalization: Option<Normalization>,
}

/// `n` draws from `f ∝ min(rho0, dist(x, ∂K))^gamma` by rejection from the
/// uniform law with acceptance `(min(rho0, dist) / min(rho0, inradius))^gamma`.
pub fn sample_margin_power(k: &ConvexBody, gamma: f64, rho0: f64, n: usize, rng: &RngStream) -> Result<MarginSample> {
    let spec = DensitySpec::margin_power(k.clone(), gamma, rho0)?;
    let (points, proposals) = spec.sampler()?.sample(n, &mut rng.rng());
    Ok(MarginSample { points, params: spec.margin, proposals, normalization: spec.normalization })
}

/// Projected draws with the exponent `gamma = (D - d) / 2` and, for ball
/// sources, the rolling-ball radius.
#[derive(Debug, Clone)]
pub struct ProjectionSample {
    pub points: PointSet,
    pub gamma: f64,
    pub rolling_radius: Option<f64>,
}

/// First `d` coordinates of `n` uniform points in `source`.
pub fn sample_projection(source: &ConvexBody, d: usize, n: usize, rng: &RngStream) -> Result<ProjectionSample> {
    let big_d = source.dim();
    if !(2 <= d && d < big_d) {
        return Err(Error::InvalidArgument(format!("projection needs 2 <= d < D, got d = {d}, D = {big_d}")));
    }
    let full = UniformSampler::new(source)?.sample(n, &mut rng.rng());
    Ok(ProjectionSample {
        points: full.truncate_coords(d),
        gamma: (big_d - d) as f64 / 2.0,
        rolling_radius: match source.kind() {
            BodyKind::Ball { radius, .. } => Some(*radius),
            _ => None,
        },
    })
}

/// Image of `source` under the projection onto the first `d` coordinates.
fn projected_body(source: &ConvexBody, d: usize) -> Result<ConvexBody> {
    match source.kind() {
        BodyKind::Ball { center, radius } => ConvexBody::ball(center[..d].to_vec(), *radius),
        BodyKind::Box { lower, upper } => ConvexBody::cuboid(lower[..d].to_vec(), upper[..d].to_vec()),
        BodyKind::Ellipsoid(e) => {
            let s = e.shape();
            let gram = s * s.transpose();
            let block = DMatrix::from_fn(d, d, |r, c| gram[(r, c)]);
            let chol =
                block.cholesky().ok_or_else(|| Error::InvalidArgument("degenerate projected ellipsoid".into()))?;
            ConvexBody::ellipsoid(e.center()[..d].to_vec(), chol.l())
        }
        BodyKind::Simplex(p) | BodyKind::Poly(p) => {
            ConvexBody::poly(convex_hull_default(&p.vertices().truncate_coords(d))?)
        }
    }
}

fn margin_normalization(k: &ConvexBody, gamma: f64, rho0: f64) -> Result<Normalization> {
    if let BodyKind::Ball { radius, .. } = k.kind() {
        return Ok(Normalization { z: ball_margin_integral(k.dim(), *radius, gamma, rho0), stderr: 0.0 });
    }
    let sampler = UniformSampler::new(k)?;
    let mut rng = NORMALIZATION_STREAM.rng();
    let mut x = vec![0.0; k.dim()];
    let (mut sum, mut sum2) = (0.0, 0.0);
    for _ in 0..NORMALIZATION_POINTS {
        sampler.sample_into(&mut rng, &mut x);
        let w = rho0.min(k.boundary_distance_unchecked(&x)).powf(gamma);
        sum += w;
        sum2 += w * w;
    }
    let m = NORMALIZATION_POINTS as f64;
    let mean = sum / m;
    let var = (sum2 / m - mean * mean).max(0.0) * m / (m - 1.0);
    let vol = k.volume();
    Ok(Normalization { z: vol * mean, stderr: vol * (var / m).sqrt() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn uniform_density_values() {
        let sq = DensitySpec::uniform(ConvexBody::unit_cube(2).unwrap());
        assert_relative_eq!(density_eval(&sq, &[0.3, 0.9]).unwrap(), 1.0);
        let disk = DensitySpec::uniform(ConvexBody::unit_ball(2).unwrap());
        assert_relative_eq!(density_eval(&disk, &[0.1, 0.2]).unwrap(), 1.0 / PI);
        assert!(matches!(density_eval(&disk, &[1.1, 0.0]), Err(Error::OutsideSupport)));
    }

    #[test]
    fn projected_ball_density_at_origin() {
        let spec = DensitySpec::projection(ConvexBody::unit_ball(3).unwrap(), 2).unwrap();
        assert_relative_eq!(density_eval(&spec, &[0.0, 0.0]).unwrap(), 3.0 / (2.0 * PI), epsilon = 1e-12);
        assert_relative_eq!(spec.bound_m(), 3.0 / (2.0 * PI), epsilon = 1e-12);
        let m = spec.margin_params().unwrap();
        assert_relative_eq!(m.gamma, 0.5);
        assert_relative_eq!(m.c, 3.0 / (2.0 * PI), epsilon = 1e-12);
    }

    #[test]
    fn disk_margin_constants() {
        let spec = DensitySpec::margin_power(ConvexBody::unit_ball(2).unwrap(), 1.0, 1.0).unwrap();
        let z = spec.normalization().unwrap().z;
        assert_relative_eq!(z, PI / 3.0, epsilon = 1e-12);
        let m = spec.margin_params().unwrap();
        assert_relative_eq!(m.l, 2.0 * PI * PI / 3.0, epsilon = 1e-12);
        assert_relative_eq!(m.t0, 3.0 / PI, epsilon = 1e-12);
        assert_relative_eq!(spec.bound_m(), 3.0 / PI, epsilon = 1e-12);
    }

    #[test]
    fn square_normalization_matches_closed_form() {
        // ∫_{[0,1]^2} min(1, ρ) dx with ρ the distance to the nearest side is 1/6
        let spec = DensitySpec::margin_power(ConvexBody::unit_cube(2).unwrap(), 1.0, 1.0).unwrap();
        let n = spec.normalization().unwrap();
        assert!((n.z - 1.0 / 6.0).abs() <= 4.0 * n.stderr, "{n:?}");
    }

    #[test]
    fn gamma_zero_is_uniform() {
        let k = ConvexBody::unit_ball(2).unwrap();
        let a = sample_margin_power(&k, 0.0, 1.0, 100, &RngStream::new(4, 0)).unwrap();
        let b = crate::sampling::sample_uniform(&k, 100, &RngStream::new(4, 0)).unwrap();
        assert_eq!(a.points, b);
        assert!(a.params.is_none());
    }

    #[test]
    fn disk_margin_acceptance_rate() {
        let k = ConvexBody::unit_ball(2).unwrap();
        let s = sample_margin_power(&k, 1.0, 1.0, 100_000, &RngStream::new(8, 0)).unwrap();
        let p = 100_000.0 / s.proposals as f64;
        let se = (p * (1.0 - p) / s.proposals as f64).sqrt();
        assert!((p - 1.0 / 3.0).abs() <= 3.0 * se, "acceptance {p}");
    }

    #[test]
    fn projections_land_in_the_disk() {
        let s = sample_projection(&ConvexBody::unit_ball(3).unwrap(), 2, 5000, &RngStream::new(1, 1)).unwrap();
        assert!(s.points.iter().all(|p| p[0] * p[0] + p[1] * p[1] <= 1.0));
        assert_eq!((s.gamma, s.rolling_radius), (0.5, Some(1.0)));
    }
}
