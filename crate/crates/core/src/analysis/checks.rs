use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::moments::{falling_factorial_mean, MomentEstimate};
use super::rate::{evaluate_rate, rate_study, RateMode, RateQuantity, TOL_EXP};
use super::replicate::{map_replicates, run_replicates_with, ReplicateOptions};
use super::report::{CheckReport, ReportRow, Statistic};
use super::stats::{chi_square_gof, ks_two_sample, linear_fit, quantile_sorted};
use crate::error::{Error, Result};
use crate::geometry::linalg::unit_ball_volume;
use crate::geometry::{
    convex_hull_default, hausdorff_distance, steiner_ball_constants, symmetric_difference_volume_with, AffineMap,
    BodyKind, ConvexBody, Polytope, PROJECTION_TOLERANCE,
};
use crate::sampling::{sample_projection, DensitySpec, RngStream, UniformSampler};

/// Number of standard errors allowed in every one-sided comparison.
pub const SIGMA_SLACK: f64 = 3.0;
/// KS p-value below which two samples are declared different.
pub const KS_ALPHA: f64 = 1e-3;
/// χ² p-value below which a law is rejected.
pub const CHI2_ALPHA: f64 = 1e-3;
/// Minimum `r²` of the log-survival line.
pub const TAIL_MIN_R_SQUARED: f64 = 0.9;
/// Exceedances required beyond the last point of the tail grid.
pub const MIN_TAIL_EXCEEDANCES: usize = 50;

fn finish(mut report: CheckReport, start: Instant) -> CheckReport {
    report.runtime_secs = start.elapsed().as_secs_f64();
    report
}

fn missing_mass_values(
    spec: &DensitySpec,
    n: usize,
    reps: usize,
    fresh_m: usize,
    base: &RngStream,
) -> Result<(Vec<f64>, usize)> {
    if !spec.is_uniform() && fresh_m == 0 {
        return Err(Error::InvalidArgument("the missing mass of a non-uniform law needs fresh_m > 0".into()));
    }
    let batch = run_replicates_with(spec, n, reps, base, ReplicateOptions { fresh_m, keep_hulls: false })?;
    let values = batch.values.iter().map(|r| r.missing_mass.expect("missing mass requested")).collect();
    Ok((values, batch.redraws))
}

/// `E[1 - μ(hull_n)] = E[R_{n+1}] / (n + 1)`, both sides from independent
/// replicate pools. Passes when the sides agree within three combined
/// standard errors.
pub fn check_efron(spec: &DensitySpec, n: usize, reps: usize, fresh_m: usize, base: &RngStream) -> Result<CheckReport> {
    let start = Instant::now();
    let (mm, redraws_l) = missing_mass_values(spec, n, reps, fresh_m, &base.fork_named("efron/missing-mass"))?;
    let lhs = MomentEstimate::from_values(mm, 1.0)?;
    let rhs_batch = map_replicates(spec, n + 1, reps, &base.fork_named("efron/vertices"), |rep| {
        Ok(rep.hull.vertex_count() as f64 / (n + 1) as f64)
    })?;
    let rhs = MomentEstimate::from_values(rhs_batch.values, 1.0)?;
    let se = lhs.combined_stderr(&rhs);
    let pass = (lhs.mean - rhs.mean).abs() <= SIGMA_SLACK * se;
    let mut report = CheckReport::new("efron", *base);
    report
        .stat("missing_mass", Statistic::stderr(lhs.mean, lhs.stderr))
        .stat("vertex_ratio", Statistic::stderr(rhs.mean, rhs.stderr))
        .stat("difference", Statistic::tolerance(lhs.mean - rhs.mean, SIGMA_SLACK * se))
        .stat("redraws", Statistic::exact((redraws_l + rhs_batch.redraws) as f64))
        .row(ReportRow {
            label: "E[1-mu(K_n)] vs E[R_{n+1}]/(n+1)".into(),
            n,
            q: 1.0,
            estimate: lhs.mean,
            stderr: se,
            bound_or_target: rhs.mean,
            pass,
            reps,
        })
        .note(format!("density {}", spec.name()));
    Ok(finish(report, start))
}

/// `E[∏_{j<q} (R_{n+q} - j)/(n + q - j)] <= E[(1 - μ(hull_n))^q]`.
///
/// The right side is estimated by the plug-in `(V_n/|K|)^q` for uniform laws
/// and, for every law, by the indicator that `q` fresh draws all miss the hull.
pub fn check_extended_efron(
    spec: &DensitySpec,
    n: usize,
    q: usize,
    reps: usize,
    base: &RngStream,
) -> Result<CheckReport> {
    if q == 0 {
        return Err(Error::InvalidQ(q));
    }
    let start = Instant::now();
    let lhs_batch = map_replicates(spec, n + q, reps, &base.fork_named("extended-efron/vertices"), |rep| {
        Ok(rep.hull.vertex_count())
    })?;
    let lhs = falling_factorial_mean(&lhs_batch.values, n, q)?;
    let uniform = spec.is_uniform();
    let volume = spec.support().volume();
    let rhs_batch = map_replicates(spec, n, reps, &base.fork_named("extended-efron/missing"), |rep| {
        let plug_in = if uniform { Some((rep.missing_volume()? / volume).powi(q as i32)) } else { None };
        let all_outside = if rep.fresh_outside(q) == q { 1.0 } else { 0.0 };
        Ok((plug_in, all_outside))
    })?;
    let mut report = CheckReport::new("extended_efron", *base);
    report
        .stat("falling_factorial", Statistic::stderr(lhs.mean, lhs.stderr))
        .stat("redraws", Statistic::exact((lhs_batch.redraws + rhs_batch.redraws) as f64))
        .note(format!("density {}", spec.name()));
    let mut routes =
        vec![("fresh_points", MomentEstimate::from_values(rhs_batch.values.iter().map(|v| v.1), q as f64)?)];
    if uniform {
        routes.insert(
            0,
            ("plug_in", MomentEstimate::from_values(rhs_batch.values.iter().map(|v| v.0.expect("uniform")), q as f64)?),
        );
    }
    for (route, rhs) in routes {
        let se = lhs.combined_stderr(&rhs);
        report.stat(format!("missing_mass_pow_q/{route}"), Statistic::stderr(rhs.mean, rhs.stderr)).row(ReportRow {
            label: format!("falling factorial <= E[(1-mu)^q] ({route})"),
            n,
            q: q as f64,
            estimate: lhs.mean,
            stderr: se,
            bound_or_target: rhs.mean + SIGMA_SLACK * se,
            pass: lhs.mean <= rhs.mean + SIGMA_SLACK * se,
            reps,
        });
    }
    Ok(finish(report, start))
}

/// Outcome of the margin-transfer inequality for one replicate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarginTransferCase {
    pub v_n: f64,
    pub missing_mass: f64,
    pub missing_mass_stderr: f64,
    pub qualifies: bool,
    pub bound: f64,
    pub slack: f64,
}

impl MarginTransferCase {
    /// `true` unless the replicate qualifies and `V_n > bound + slack`.
    pub fn holds(&self) -> bool {
        !self.qualifies || self.v_n <= self.bound + self.slack
    }
}

/// Evaluates `V_n <= (L + 1) d_f^{α/(α+1)}` for an estimate `d_f` from
/// `m` fresh points. The slack is three delta-method standard errors of the
/// bound; at `d_f = 0` the bound is evaluated at `3/m` instead.
pub fn margin_transfer_case(
    params: &crate::sampling::MarginParams,
    v_n: f64,
    outside: usize,
    m: usize,
) -> MarginTransferCase {
    let p = outside as f64 / m as f64;
    let se = (p * (1.0 - p) / m as f64).sqrt();
    let a = params.alpha / (params.alpha + 1.0);
    let (bound, slack) = if outside == 0 {
        (0.0, params.volume_bound(SIGMA_SLACK / m as f64))
    } else {
        (params.volume_bound(p), SIGMA_SLACK * (params.l + 1.0) * a * p.powf(a - 1.0) * se)
    };
    MarginTransferCase {
        v_n,
        missing_mass: p,
        missing_mass_stderr: se,
        qualifies: p <= params.premise_threshold(),
        bound,
        slack,
    }
}

/// Per-replicate check of the volume bound implied by the margin condition,
/// on replicates whose missing mass satisfies the premise `d_f <= t0^{α+1}`.
pub fn check_margin_transfer(
    spec: &DensitySpec,
    n: usize,
    reps: usize,
    fresh_m: usize,
    base: &RngStream,
) -> Result<CheckReport> {
    let params = spec
        .margin_params()
        .ok_or_else(|| Error::InvalidArgument(format!("{} declares no margin parameters", spec.name())))?;
    if fresh_m == 0 {
        return Err(Error::InvalidArgument("margin transfer needs fresh_m > 0".into()));
    }
    let start = Instant::now();
    let batch = map_replicates(spec, n, reps, &base.fork_named("margin-transfer"), |rep| {
        let v_n = rep.missing_volume()?;
        let outside = rep.fresh_outside(fresh_m);
        Ok(margin_transfer_case(&params, v_n, outside, fresh_m))
    })?;
    let qualifying = batch.values.iter().filter(|c| c.qualifies).count();
    let violations = batch.values.iter().filter(|c| !c.holds()).count();
    let worst = batch.values.iter().filter(|c| c.qualifies).map(|c| c.v_n / (c.bound + c.slack)).fold(0.0, f64::max);
    let mut report = CheckReport::new("margin_transfer", *base);
    report
        .stat("alpha", Statistic::exact(params.alpha))
        .stat("L", Statistic::exact(params.l))
        .stat("t0", Statistic::exact(params.t0))
        .stat("qualifying_fraction", Statistic::exact(qualifying as f64 / reps as f64))
        .stat("violations", Statistic::exact(violations as f64))
        .stat("max_ratio_to_bound", Statistic::tolerance(worst, 1.0))
        .stat("redraws", Statistic::exact(batch.redraws as f64))
        .row(ReportRow {
            label: "violations of V_n <= (L+1) d_f^(alpha/(alpha+1))".into(),
            n,
            q: 1.0,
            estimate: violations as f64,
            stderr: 0.0,
            bound_or_target: 0.0,
            pass: violations == 0,
            reps,
        })
        .note(format!("density {}; {qualifying}/{reps} replicates satisfy the premise", spec.name()));
    if qualifying == 0 {
        report.note("no replicate satisfied the premise");
    }
    Ok(finish(report, start))
}

/// Log-linear fit of an empirical survival function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// `(x, P[Z > x])` on the grid.
    pub grid: Vec<(f64, f64)>,
    /// Samples beyond the last grid point.
    pub exceedances: usize,
}

/// Fits `ln P[Z > x]` against `x` on `points` equally spaced abscissae
/// between the `lo` and `hi` empirical quantiles.
pub fn tail_fit(samples: &[f64], lo: f64, hi: f64, points: usize) -> Result<TailFit> {
    if samples.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut z = samples.to_vec();
    z.sort_by(f64::total_cmp);
    let (x0, x1) = (quantile_sorted(&z, lo), quantile_sorted(&z, hi));
    let total = z.len() as f64;
    let grid: Vec<(f64, f64)> = (0..points)
        .map(|k| {
            let x = x0 + (x1 - x0) * k as f64 / (points - 1) as f64;
            let above = z.len() - z.partition_point(|&v| v <= x);
            (x, above as f64 / total)
        })
        .collect();
    let exceedances = z.len() - z.partition_point(|&v| v <= x1);
    if exceedances < MIN_TAIL_EXCEEDANCES {
        return Err(Error::InsufficientTailMass { count: exceedances });
    }
    let xs: Vec<f64> = grid.iter().map(|g| g.0).collect();
    let ys: Vec<f64> = grid.iter().map(|g| g.1.ln()).collect();
    let fit = linear_fit(&xs, &ys, None)?;
    Ok(TailFit { slope: fit.slope, intercept: fit.intercept, r_squared: fit.r_squared, grid, exceedances })
}

/// Exponential-tail property of `Z = n (d_f - ĉ n^{-2/(d+1)})`: the log
/// survival on the 60th–99.5th percentile range is a decreasing line with
/// `r² >= 0.9`. Without `c_hat` the shift is the sample mean.
pub fn check_deviation_tail(
    spec: &DensitySpec,
    n: usize,
    reps: usize,
    fresh_m: usize,
    c_hat: Option<f64>,
    base: &RngStream,
) -> Result<CheckReport> {
    let start = Instant::now();
    let (mm, redraws) = missing_mass_values(spec, n, reps, fresh_m, &base.fork_named("deviation-tail"))?;
    let rate = (n as f64).powf(-2.0 / (spec.dim() as f64 + 1.0));
    let mean = mm.iter().sum::<f64>() / mm.len() as f64;
    let c_hat = c_hat.unwrap_or(mean / rate);
    let z: Vec<f64> = mm.iter().map(|m| n as f64 * (m - c_hat * rate)).collect();
    let fit = tail_fit(&z, 0.60, 0.995, 20)?;
    let pass = fit.slope < 0.0 && fit.r_squared >= TAIL_MIN_R_SQUARED;
    let mut report = CheckReport::new("deviation_tail", *base);
    report
        .stat("c_hat", Statistic::exact(c_hat))
        .stat("decay_rate", Statistic::exact(-fit.slope))
        .stat("log_prefactor", Statistic::exact(fit.intercept))
        .stat("r_squared", Statistic::tolerance(fit.r_squared, TAIL_MIN_R_SQUARED))
        .stat("exceedances", Statistic::exact(fit.exceedances as f64))
        .stat("redraws", Statistic::exact(redraws as f64))
        .row(ReportRow {
            label: "log-survival r^2 (slope < 0)".into(),
            n,
            q: 1.0,
            estimate: fit.r_squared,
            stderr: 0.0,
            bound_or_target: TAIL_MIN_R_SQUARED,
            pass,
            reps,
        })
        .note(format!("density {}; fitted slope {:.4}", spec.name(), fit.slope));
    Ok(finish(report, start))
}

/// Two-sample KS comparison of `V_n/|K|` on `K` and on `T K`, from
/// independent streams.
pub fn check_affine_invariance(
    k: &ConvexBody,
    t: &AffineMap,
    n: usize,
    reps: usize,
    base: &RngStream,
) -> Result<CheckReport> {
    let start = Instant::now();
    let image = t.apply_body(k)?;
    let arm = |body: &ConvexBody, tag: &str| -> Result<Vec<f64>> {
        let spec = DensitySpec::uniform(body.clone());
        Ok(missing_mass_values(&spec, n, reps, 0, &base.fork_named(tag))?.0)
    };
    let a = arm(k, "affine/original")?;
    let b = arm(&image, "affine/image")?;
    let ks = ks_two_sample(&a, &b)?;
    let ma = MomentEstimate::from_values(a.iter().copied(), 1.0)?;
    let mb = MomentEstimate::from_values(b.iter().copied(), 1.0)?;
    let mut report = CheckReport::new("affine_invariance", *base);
    report
        .stat("ks_statistic", Statistic::exact(ks.statistic))
        .stat("p_value", Statistic::tolerance(ks.p_value, KS_ALPHA))
        .stat("det", Statistic::exact(t.det()))
        .stat("condition_number", Statistic::exact(t.condition_number()))
        .stat("mean_original", Statistic::stderr(ma.mean, ma.stderr))
        .stat("mean_image", Statistic::stderr(mb.mean, mb.stderr))
        .row(ReportRow {
            label: "KS p-value of V_n/|K| on K vs TK".into(),
            n,
            q: 1.0,
            estimate: ks.p_value,
            stderr: 0.0,
            bound_or_target: KS_ALPHA,
            pass: ks.p_value > KS_ALPHA,
            reps,
        })
        .note(format!("{} mapped to {}", k.kind_name(), image.kind_name()));
    Ok(finish(report, start))
}

/// Vertex-count exponents of non-uniform laws against `(d-1)/(d+1)`, with the
/// uniform law on `k` reported for comparison.
pub fn check_worst_case_uniform(
    k: &ConvexBody,
    roster: &[DensitySpec],
    n_grid: &[usize],
    reps: usize,
    base: &RngStream,
) -> Result<CheckReport> {
    let start = Instant::now();
    let mut report = CheckReport::new("worst_case_uniform", *base);
    let d = k.dim() as f64;
    let target = (d - 1.0) / (d + 1.0);
    let uniform = DensitySpec::uniform(k.clone());
    let study = rate_study(&uniform, n_grid, reps, 0, &base.fork_named("worst-case/uniform"))?;
    let (fit, _) = evaluate_rate(&study, &uniform, RateQuantity::VertexCount, 1.0, RateMode::Bound, *base)?;
    report.stat(format!("exponent/{}", uniform.name()), Statistic::stderr(fit.exponent, fit.exponent_stderr));
    report.fits.push(fit);
    for (i, spec) in roster.iter().enumerate() {
        let study = rate_study(spec, n_grid, reps, 0, &base.fork(i as u64))?;
        let (fit, _) = evaluate_rate(&study, spec, RateQuantity::VertexCount, 1.0, RateMode::Bound, *base)?;
        report.stat(format!("exponent/{}", spec.name()), Statistic::stderr(fit.exponent, fit.exponent_stderr)).row(
            ReportRow {
                label: format!("R_n exponent of {}", spec.name()),
                n: *n_grid.last().expect("non-empty grid"),
                q: 1.0,
                estimate: fit.exponent,
                stderr: fit.exponent_stderr,
                bound_or_target: target + TOL_EXP,
                pass: fit.exponent <= target + TOL_EXP,
                reps,
            },
        );
        report.fits.push(fit);
    }
    Ok(finish(report, start))
}

/// One random pair in the symmetric-difference domination check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DominationCase {
    pub hausdorff: f64,
    pub symmetric_difference: MomentEstimate,
    pub bound: f64,
}

impl DominationCase {
    pub fn holds(&self) -> bool {
        self.symmetric_difference.mean <= self.bound + SIGMA_SLACK * self.symmetric_difference.stderr
    }
}

/// `|G △ G'| <= α_1 d_H(G, G')` for hulls of between `d + 1` and `max_points`
/// uniform points in the unit ball, `|G △ G'|` estimated from `m` points.
pub fn check_hausdorff_domination(
    d: usize,
    pairs: usize,
    max_points: usize,
    m: usize,
    base: &RngStream,
) -> Result<CheckReport> {
    if max_points < d + 1 {
        return Err(Error::InvalidArgument(format!("max_points must be at least {}", d + 1)));
    }
    let start = Instant::now();
    let alpha1 = steiner_ball_constants(d).alpha1;
    let ball = ConvexBody::unit_ball(d)?;
    let sampler = UniformSampler::new(&ball)?;
    let stream = base.fork_named("hausdorff-domination");
    let cases: Vec<DominationCase> = (0..pairs)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream.stream(i as u64).rng();
            let hull = |rng: &mut crate::sampling::StreamRng| -> Result<Polytope> {
                loop {
                    let k = rng.random_range(d + 1..=max_points);
                    match convex_hull_default(&sampler.sample(k, rng)) {
                        Ok(p) => return Ok(p),
                        Err(Error::DegenerateInput { .. } | Error::InvalidPolytope(_)) => continue,
                        Err(e) => return Err(e),
                    }
                }
            };
            let g = hull(&mut rng)?;
            let h = hull(&mut rng)?;
            let hausdorff = hausdorff_distance(&g, &h, PROJECTION_TOLERANCE)?;
            let symmetric_difference = symmetric_difference_volume_with(&g, &h, m, &mut rng)?;
            Ok(DominationCase { hausdorff, symmetric_difference, bound: alpha1 * hausdorff })
        })
        .collect::<Result<_>>()?;
    let violations = cases.iter().filter(|c| !c.holds()).count();
    let worst = cases.iter().map(|c| c.symmetric_difference.mean / c.bound).fold(0.0, f64::max);
    let mut report = CheckReport::new("hausdorff_domination", *base);
    report
        .stat("alpha1", Statistic::exact(alpha1))
        .stat("violations", Statistic::exact(violations as f64))
        .stat("max_ratio_to_bound", Statistic::tolerance(worst, 1.0))
        .row(ReportRow {
            label: format!("violations of |G^G'| <= alpha1 d_H in B_{d}"),
            n: max_points,
            q: 1.0,
            estimate: violations as f64,
            stderr: 0.0,
            bound_or_target: 0.0,
            pass: violations == 0,
            reps: pairs,
        });
    Ok(finish(report, start))
}

/// Composite Simpson rule with `intervals` (even) panels.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, intervals: usize) -> f64 {
    let h = (b - a) / intervals as f64;
    let mut s = f(a) + f(b);
    for k in 1..intervals {
        s += if k % 2 == 1 { 4.0 } else { 2.0 } * f(a + k as f64 * h);
    }
    s * h / 3.0
}

/// `P[r1 <= |X - c| <= r2]` for the projection of the uniform law on a ball
/// of radius `big_r` in `R^D` onto `R^d`. With `r = R cos θ` the integrand
/// `sin^{D-d+1} θ cos^{d-1} θ` is smooth on the whole range.
pub fn projected_ball_radial_mass(big_d: usize, d: usize, big_r: f64, r1: f64, r2: f64) -> f64 {
    let codim = (big_d - d) as i32;
    // β_{D-d} R^{D-d} / (β_D R^D) · d β_d · R^d after the substitution
    let scale = unit_ball_volume(big_d - d) * d as f64 * unit_ball_volume(d) / unit_ball_volume(big_d);
    let theta = |r: f64| (r / big_r).clamp(-1.0, 1.0).acos();
    let integrand = |t: f64| t.sin().powi(codim + 1) * t.cos().powi(d as i32 - 1);
    scale * simpson(integrand, theta(r2), theta(r1), 256)
}

/// Radial law and near-boundary lower bound of a projected ball.
///
/// Near the boundary the binned density must exceed the area-weighted mean
/// of `c t^γ` (`t` the distance to the boundary) minus three standard
/// errors; the law of `|X|` must pass a χ² test on 40 equal-width bins.
pub fn check_projection_density(source: &ConvexBody, d: usize, n: usize, base: &RngStream) -> Result<CheckReport> {
    let (center, big_r) = match source.kind() {
        BodyKind::Ball { center, radius } => (center[..d].to_vec(), *radius),
        _ => return Err(Error::Unsupported(format!("projection check for a {}", source.kind_name()))),
    };
    let start = Instant::now();
    let big_d = source.dim();
    let spec = DensitySpec::projection(source.clone(), d)?;
    let params = spec.margin_params().expect("ball projections carry margin parameters");
    let sample = sample_projection(source, d, n, &base.fork_named("projection-density"))?;
    let radii: Vec<f64> =
        sample.points.iter().map(|p| p.iter().zip(&center).map(|(a, c)| (a - c).powi(2)).sum::<f64>().sqrt()).collect();
    let mut report = CheckReport::new("projection_density", *base);
    report
        .stat("c", Statistic::exact(params.c))
        .stat("gamma", Statistic::exact(params.gamma))
        .stat("bound_M", Statistic::exact(spec.bound_m()));

    let beta = unit_ball_volume(d);
    let bins = 10;
    let width = 0.2 * big_r / bins as f64;
    for b in 0..bins {
        let (t1, t2) = (b as f64 * width, (b + 1) as f64 * width);
        let count = radii.iter().filter(|&&r| r <= big_r - t1 && r > big_r - t2).count() as f64;
        let area = beta * ((big_r - t1).powi(d as i32) - (big_r - t2).powi(d as i32));
        let density = count / (n as f64 * area);
        let se = count.sqrt() / (n as f64 * area);
        let shell = d as f64 * beta;
        let bound =
            simpson(|t| params.c * t.powf(params.gamma) * shell * (big_r - t).powi(d as i32 - 1), t1, t2, 64) / area;
        report.row(ReportRow {
            label: format!("density on t in ({t1:.2},{t2:.2}] >= mean of c t^gamma"),
            n,
            q: 1.0,
            estimate: density,
            stderr: se,
            bound_or_target: bound,
            pass: density >= bound - SIGMA_SLACK * se,
            reps: 1,
        });
    }

    let chi_bins = 40;
    let mut observed = vec![0u64; chi_bins];
    for &r in &radii {
        observed[((r / big_r * chi_bins as f64) as usize).min(chi_bins - 1)] += 1;
    }
    let expected: Vec<f64> = (0..chi_bins)
        .map(|k| {
            let r1 = big_r * k as f64 / chi_bins as f64;
            let r2 = big_r * (k + 1) as f64 / chi_bins as f64;
            n as f64 * projected_ball_radial_mass(big_d, d, big_r, r1, r2)
        })
        .collect();
    let chi = chi_square_gof(&observed, &expected, 0)?;
    report
        .stat("chi2", Statistic::exact(chi.statistic))
        .stat("chi2_p_value", Statistic::tolerance(chi.p_value, CHI2_ALPHA))
        .row(ReportRow {
            label: "chi-square p-value of the radial law".into(),
            n,
            q: 1.0,
            estimate: chi.p_value,
            stderr: 0.0,
            bound_or_target: CHI2_ALPHA,
            pass: chi.p_value > CHI2_ALPHA,
            reps: 1,
        });
    Ok(finish(report, start))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Exp};

    #[test]
    fn tail_slope_recovers_exponential_rate() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let exp = Exp::new(2.5).unwrap();
        let z: Vec<f64> = (0..50_000).map(|_| exp.sample(&mut rng)).collect();
        let fit = tail_fit(&z, 0.6, 0.995, 20).unwrap();
        assert!((-fit.slope / 2.5 - 1.0).abs() < 0.1, "slope {}", fit.slope);
        assert!(fit.r_squared > 0.99);
    }

    #[test]
    fn thin_tails_are_reported() {
        let z: Vec<f64> = (0..1000).map(|k| k as f64).collect();
        assert!(matches!(tail_fit(&z, 0.6, 0.995, 20), Err(Error::InsufficientTailMass { count: 5 })));
    }

    #[test]
    fn zero_missing_mass_holds_trivially() {
        let p = crate::sampling::MarginParams::from_slow_decay(
            1.0,
            1.0,
            3.0 / std::f64::consts::PI,
            2.0 * std::f64::consts::PI,
        );
        let c = margin_transfer_case(&p, 0.0, 0, 100_000);
        assert!(c.qualifies && c.holds());
    }

    #[test]
    fn projected_radial_mass_matches_closed_form() {
        // B³ onto the disk: P[|X| <= r] = 1 - (1 - r²)^{3/2}
        let cdf = |r: f64| 1.0 - (1.0 - r * r).powf(1.5);
        for (a, b) in [(0.0, 0.3), (0.3, 0.9), (0.9, 0.975), (0.975, 1.0)] {
            assert_relative_eq!(projected_ball_radial_mass(3, 2, 1.0, a, b), cdf(b) - cdf(a), epsilon = 1e-9);
        }
        assert_relative_eq!(projected_ball_radial_mass(5, 3, 2.0, 0.0, 2.0), 1.0, epsilon = 1e-6);
    }
}
