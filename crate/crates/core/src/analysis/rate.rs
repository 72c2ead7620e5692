use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::moments::MomentEstimate;
use super::replicate::{run_replicates_with, ReplicateOptions};
use super::report::{CheckReport, ReportRow, Statistic};
use super::stats::linear_fit;
use crate::error::{Error, Result};
use crate::sampling::{DensitySpec, RngStream};

/// Exponent tolerance for first moments.
pub const TOL_EXP: f64 = 0.08;
/// Exponent tolerance for moments of order above one.
pub const TOL_EXP_HIGHER: f64 = 0.12;
/// Minimum `r²` for a two-sided exponent check.
pub const MIN_R_SQUARED: f64 = 0.98;
/// Minimum replicates per grid point in [`check_rate`].
pub const MIN_RATE_REPS: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RateQuantity {
    /// `d_f(K, hull)`
    MissingMass,
    /// `V_n / |K|`
    VolumeFraction,
    /// `R_n`
    VertexCount,
}

impl RateQuantity {
    pub fn label(self) -> &'static str {
        match self {
            RateQuantity::MissingMass => "missing_mass",
            RateQuantity::VolumeFraction => "V_n/|K|",
            RateQuantity::VertexCount => "R_n",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RateMode {
    /// `|exponent - target| <= tol` and `r² >= MIN_R_SQUARED`.
    Tight,
    /// `exponent <= target + tol`.
    Bound,
}

/// Power law `moment ≈ e^{intercept} n^{exponent}` fitted on log-log scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub label: String,
    pub q: f64,
    pub exponent: f64,
    pub intercept: f64,
    pub exponent_stderr: f64,
    pub r_squared: f64,
    pub n_grid: Vec<usize>,
    pub points: Vec<MomentEstimate>,
}

/// Weighted least squares of `ln mean` on `ln n` with weights `(mean/se)²`,
/// the inverse delta-method variance of `ln mean`. Falls back to ordinary
/// least squares when some standard error is zero.
pub fn fit_power_law(n_grid: &[usize], moments: &[MomentEstimate]) -> Result<RateFit> {
    if n_grid.len() < 4 {
        return Err(Error::InvalidArgument(format!("a rate fit needs at least 4 grid points, got {}", n_grid.len())));
    }
    if n_grid.len() != moments.len() {
        return Err(Error::DimensionMismatch { expected: n_grid.len(), found: moments.len() });
    }
    for (&n, m) in n_grid.iter().zip(moments) {
        if !(m.mean > 0.0) {
            return Err(Error::NonPositiveMoment { n, value: m.mean });
        }
    }
    let x: Vec<f64> = n_grid.iter().map(|&n| (n as f64).ln()).collect();
    let y: Vec<f64> = moments.iter().map(|m| m.mean.ln()).collect();
    let weights: Option<Vec<f64>> =
        moments.iter().all(|m| m.stderr > 0.0).then(|| moments.iter().map(|m| (m.mean / m.stderr).powi(2)).collect());
    let fit = linear_fit(&x, &y, weights.as_deref())?;
    Ok(RateFit {
        label: String::new(),
        q: moments[0].q,
        exponent: fit.slope,
        intercept: fit.intercept,
        exponent_stderr: fit.slope_stderr,
        r_squared: fit.r_squared,
        n_grid: n_grid.to_vec(),
        points: moments.to_vec(),
    })
}

/// Per-replicate summaries on a grid of sample sizes.
#[derive(Debug, Clone)]
pub struct RateStudy {
    pub n_grid: Vec<usize>,
    pub reps: usize,
    /// `[grid index][replicate] = (R_n, V_n / |K|, missing mass)`
    pub values: Vec<Vec<(usize, f64, Option<f64>)>>,
    pub redraws: usize,
}

impl RateStudy {
    pub fn moments(&self, quantity: RateQuantity, q: f64) -> Result<Vec<MomentEstimate>> {
        self.values
            .iter()
            .map(|reps| {
                let xs: Vec<f64> = reps
                    .iter()
                    .map(|&(r, v, m)| match quantity {
                        RateQuantity::VertexCount => Ok(r as f64),
                        RateQuantity::VolumeFraction => Ok(v),
                        RateQuantity::MissingMass => m.ok_or_else(|| {
                            Error::InvalidArgument("missing mass needs fresh_m > 0 for non-uniform laws".into())
                        }),
                    })
                    .collect::<Result<_>>()?;
                super::moments::estimate_moment(&xs, q)
            })
            .collect()
    }

    pub fn fit(&self, quantity: RateQuantity, q: f64) -> Result<RateFit> {
        let mut fit = fit_power_law(&self.n_grid, &self.moments(quantity, q)?)?;
        fit.label = format!("E[{}^{q}]", quantity.label());
        Ok(fit)
    }
}

/// Runs `reps` replicates at every `n` in `n_grid`; grid point `n` draws from
/// `base.fork(n)`.
pub fn rate_study(
    spec: &DensitySpec,
    n_grid: &[usize],
    reps: usize,
    fresh_m: usize,
    base: &RngStream,
) -> Result<RateStudy> {
    let mut values = Vec::with_capacity(n_grid.len());
    let mut redraws = 0;
    let volume = spec.support().volume();
    for &n in n_grid {
        let batch =
            run_replicates_with(spec, n, reps, &base.fork(n as u64), ReplicateOptions { fresh_m, keep_hulls: false })?;
        redraws += batch.redraws;
        values.push(batch.values.into_iter().map(|r| (r.r_n, r.v_n / volume, r.missing_mass)).collect());
    }
    Ok(RateStudy { n_grid: n_grid.to_vec(), reps, values, redraws })
}

/// Predicted exponent: `q(d-1)/(d+1)` for vertex counts, `-2q/(d+1)` for the
/// missing mass, and `-2αq/((α+1)(d+1))` for the missing volume of a law
/// with margin exponent `α`.
pub fn target_exponent(spec: &DensitySpec, quantity: RateQuantity, q: f64) -> f64 {
    let d = spec.dim() as f64;
    match quantity {
        RateQuantity::VertexCount => q * (d - 1.0) / (d + 1.0),
        RateQuantity::MissingMass => -2.0 * q / (d + 1.0),
        RateQuantity::VolumeFraction => match spec.margin_params() {
            Some(m) if !spec.is_uniform() => -2.0 * m.alpha * q / ((m.alpha + 1.0) * (d + 1.0)),
            _ => -2.0 * q / (d + 1.0),
        },
    }
}

/// Two-sided only for uniform laws on smooth bodies.
pub fn default_mode(spec: &DensitySpec) -> RateMode {
    if spec.is_uniform() && spec.support().is_smooth() {
        RateMode::Tight
    } else {
        RateMode::Bound
    }
}

pub fn rate_tolerance(q: f64) -> f64 {
    if q > 1.0 {
        TOL_EXP_HIGHER
    } else {
        TOL_EXP
    }
}

/// Fits `quantity^q` on an existing study and judges the exponent.
pub fn evaluate_rate(
    study: &RateStudy,
    spec: &DensitySpec,
    quantity: RateQuantity,
    q: f64,
    mode: RateMode,
    seed: RngStream,
) -> Result<(RateFit, CheckReport)> {
    let fit = study.fit(quantity, q)?;
    let target = target_exponent(spec, quantity, q);
    let tol = rate_tolerance(q);
    let pass = match mode {
        RateMode::Tight => (fit.exponent - target).abs() <= tol && fit.r_squared >= MIN_R_SQUARED,
        RateMode::Bound => fit.exponent <= target + tol,
    };
    let name = match quantity {
        RateQuantity::MissingMass => "rate_missing_mass",
        RateQuantity::VolumeFraction => "rate_Vn",
        RateQuantity::VertexCount => "rate_Rn",
    };
    let mut report = CheckReport::new(name, seed);
    report
        .stat("exponent", Statistic::stderr(fit.exponent, fit.exponent_stderr))
        .stat("target", Statistic::tolerance(target, tol))
        .stat("r_squared", Statistic::tolerance(fit.r_squared, MIN_R_SQUARED))
        .stat("redraws", Statistic::exact(study.redraws as f64))
        .row(ReportRow {
            label: format!("{} exponent ({:?})", fit.label, mode).to_lowercase(),
            n: *study.n_grid.last().expect("non-empty grid"),
            q,
            estimate: fit.exponent,
            stderr: fit.exponent_stderr,
            bound_or_target: target,
            pass,
            reps: study.reps,
        })
        .note(format!("density {}", spec.name()));
    report.fits.push(fit.clone());
    Ok((fit, report))
}

/// Fresh rate study for one quantity, judged in [`default_mode`].
pub fn check_rate(
    spec: &DensitySpec,
    quantity: RateQuantity,
    q: f64,
    n_grid: &[usize],
    reps: usize,
    fresh_m: usize,
    base: &RngStream,
) -> Result<(RateFit, CheckReport)> {
    if reps < MIN_RATE_REPS {
        return Err(Error::InvalidArgument(format!(
            "rate checks need at least {MIN_RATE_REPS} replicates per grid point, got {reps}"
        )));
    }
    let start = Instant::now();
    let study = rate_study(spec, n_grid, reps, fresh_m, base)?;
    let (fit, mut report) = evaluate_rate(&study, spec, quantity, q, default_mode(spec), *base)?;
    report.runtime_secs = start.elapsed().as_secs_f64();
    Ok((fit, report))
}

/// `start, start·factor, …` up to and including `stop`.
pub fn geometric_grid(start: usize, stop: usize, factor: usize) -> Result<Vec<usize>> {
    if start == 0 || factor < 2 || stop < start {
        return Err(Error::InvalidArgument(format!("bad grid {start}:{stop}:x{factor}")));
    }
    let mut out = vec![start];
    while let Some(next) = out.last().and_then(|&n| n.checked_mul(factor)).filter(|&n| n <= stop) {
        out.push(next);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn exact_power_law() {
        let grid = geometric_grid(64, 8192, 2).unwrap();
        assert_eq!(grid.len(), 8);
        let moments: Vec<MomentEstimate> = grid
            .iter()
            .map(|&n| MomentEstimate { q: 1.0, mean: (n as f64).powf(-2.0 / 3.0), stderr: 0.0, reps: 1 })
            .collect();
        let fit = fit_power_law(&grid, &moments).unwrap();
        assert_relative_eq!(fit.exponent, -2.0 / 3.0, epsilon = 1e-12);
        assert_relative_eq!(fit.r_squared, 1.0);
    }

    #[test]
    fn non_positive_moment_is_rejected() {
        let grid = [10, 20, 40, 80];
        let m = |mean| MomentEstimate { q: 1.0, mean, stderr: 0.1, reps: 5 };
        let err = fit_power_law(&grid, &[m(1.0), m(0.5), m(0.0), m(0.1)]).unwrap_err();
        assert!(matches!(err, Error::NonPositiveMoment { n: 40, .. }));
    }

    #[test]
    fn short_grids_are_rejected() {
        assert!(fit_power_law(&[1, 2, 4], &[]).is_err());
    }
}
