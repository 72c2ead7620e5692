use std::fs::{self, File};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use log::info;
use serde::{Deserialize, Serialize};

use super::config::{CheckName, ExperimentConfig, DEFAULT_CONDITION};
use crate::analysis::{
    check_affine_invariance, check_deviation_tail, check_efron, check_extended_efron, check_hausdorff_domination,
    check_margin_transfer, check_projection_density, check_worst_case_uniform, default_mode, evaluate_rate, rate_study,
    CheckReport, RateFit, RateQuantity, RateStudy, MIN_RATE_REPS,
};
use crate::error::{Error, Result};
use crate::geometry::AffineMap;
use crate::sampling::{DensitySpec, RngStream};

/// Header of `results.csv`.
pub const RESULTS_HEADER: [&str; 10] =
    ["check", "n", "q", "estimate", "stderr", "bound_or_target", "pass", "reps", "seed", "label"];

/// Header of `plot_data.csv`.
pub const PLOT_HEADER: [&str; 7] = ["check", "fit", "q", "n", "log_n", "log_estimate", "stderr_log"];

/// Everything a run produced.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: String,
    pub seed: u64,
    pub reports: Vec<CheckReport>,
    pub wall_clock_secs: f64,
}

impl ExperimentReport {
    pub fn all_pass(&self) -> bool {
        self.reports.iter().all(|r| r.pass)
    }

    pub fn fits(&self) -> impl Iterator<Item = (&str, &RateFit)> {
        self.reports.iter().flat_map(|r| r.fits.iter().map(move |f| (r.check_name.as_str(), f)))
    }

    pub fn from_json(path: impl AsRef<Path>) -> Result<Self> {
        Ok(serde_json::from_reader(File::open(path)?)?)
    }
}

/// Paths written by [`run`].
#[derive(Debug, Clone)]
pub struct OutputPaths {
    pub results_csv: PathBuf,
    pub plot_csv: PathBuf,
    pub report_json: PathBuf,
}

impl OutputPaths {
    pub fn in_dir(dir: &Path) -> Self {
        OutputPaths {
            results_csv: dir.join("results.csv"),
            plot_csv: dir.join("plot_data.csv"),
            report_json: dir.join("report.json"),
        }
    }
}

/// Streams check results to disk as they complete.
struct Sink {
    results: csv::Writer<File>,
    plot: csv::Writer<File>,
    paths: OutputPaths,
}

impl Sink {
    fn create(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)?;
        let paths = OutputPaths::in_dir(dir);
        let mut results = csv::Writer::from_path(&paths.results_csv)?;
        results.write_record(RESULTS_HEADER)?;
        results.flush()?;
        let mut plot = csv::Writer::from_path(&paths.plot_csv)?;
        plot.write_record(PLOT_HEADER)?;
        plot.flush()?;
        Ok(Sink { results, plot, paths })
    }

    fn push(&mut self, report: &CheckReport, seed: u64) -> Result<()> {
        write_report_rows(&mut self.results, report, seed)?;
        write_plot_rows(&mut self.plot, report)?;
        self.results.flush()?;
        self.plot.flush()?;
        Ok(())
    }
}

/// Writes the `results.csv` rows of one report produced by a run with `seed`.
pub fn write_report_rows<W: Write>(w: &mut csv::Writer<W>, report: &CheckReport, seed: u64) -> Result<()> {
    let seed = seed.to_string();
    for row in &report.rows {
        w.write_record([
            report.check_name.as_str(),
            &row.n.to_string(),
            &row.q.to_string(),
            &row.estimate.to_string(),
            &row.stderr.to_string(),
            &row.bound_or_target.to_string(),
            if row.pass { "true" } else { "false" },
            &row.reps.to_string(),
            &seed,
            &row.label,
        ])?;
    }
    Ok(())
}

fn write_plot_rows<W: Write>(w: &mut csv::Writer<W>, report: &CheckReport) -> Result<()> {
    for fit in &report.fits {
        for (n, m) in fit.n_grid.iter().zip(&fit.points) {
            w.write_record([
                report.check_name.as_str(),
                &fit.label,
                &fit.q.to_string(),
                &n.to_string(),
                &(*n as f64).ln().to_string(),
                &m.mean.ln().to_string(),
                &(m.stderr / m.mean).to_string(),
            ])?;
        }
    }
    Ok(())
}

/// Runs every requested check with the resolved `seed`, writing
/// `results.csv`, `plot_data.csv` and `report.json` under `out_dir`.
///
/// Rows are flushed after each check, so a failing check leaves the earlier
/// results on disk; its error is returned with the check name attached.
pub fn run(config: &ExperimentConfig, seed: u64, out_dir: &Path) -> Result<ExperimentReport> {
    let start = Instant::now();
    let mut sink = Sink::create(out_dir)?;
    let mut report = ExperimentReport { config: config.serialize(), seed, reports: Vec::new(), wall_clock_secs: 0.0 };
    let mut runner = Runner { config, base: RngStream::new(seed, 0), study: None };
    let mut outcome = Ok(());
    for &check in &config.checks {
        info!("running {check}");
        match runner.run_check(check) {
            Ok(reports) => {
                for r in reports {
                    sink.push(&r, seed)?;
                    report.reports.push(r);
                }
            }
            Err(e) => {
                outcome = Err(Error::Check { check: check.to_string(), source: Box::new(e) });
                break;
            }
        }
    }
    report.wall_clock_secs = start.elapsed().as_secs_f64();
    serde_json::to_writer_pretty(File::create(&sink.paths.report_json)?, &report)?;
    outcome.map(|_| report)
}

struct Runner<'a> {
    config: &'a ExperimentConfig,
    base: RngStream,
    /// One replicate study serves every rate check of a run.
    study: Option<RateStudy>,
}

impl Runner<'_> {
    fn stream(&self, check: CheckName) -> RngStream {
        self.base.fork_named(check.as_str())
    }

    fn rate_study(&mut self, spec: &DensitySpec) -> Result<&RateStudy> {
        if self.study.is_none() {
            let c = self.config;
            let reps = c.reps()?;
            if reps < MIN_RATE_REPS {
                return Err(Error::validation("reps", format!("rate checks need at least {MIN_RATE_REPS}")));
            }
            let fresh_m = if spec.is_uniform() { 0 } else { c.fresh_m() };
            let needs_mass = c.checks.contains(&CheckName::RateMissingMass);
            let study = rate_study(
                spec,
                &c.n_grid()?,
                reps,
                if needs_mass { fresh_m } else { 0 },
                &self.base.fork_named("rate-study"),
            )?;
            self.study = Some(study);
        }
        Ok(self.study.as_ref().expect("just built"))
    }

    fn run_check(&mut self, check: CheckName) -> Result<Vec<CheckReport>> {
        let c = self.config;
        let stream = self.stream(check);
        match check {
            CheckName::Efron => Ok(vec![check_efron(&c.density_spec()?, c.n()?, c.reps()?, c.fresh_m(), &stream)?]),
            CheckName::ExtendedEfron => {
                let spec = c.density_spec()?;
                c.q_list()
                    .into_iter()
                    .map(|q| {
                        if q.fract() != 0.0 {
                            return Err(Error::validation("q", "extended Efron needs integer q"));
                        }
                        check_extended_efron(&spec, c.n()?, q as usize, c.reps()?, &stream.fork(q as u64))
                    })
                    .collect()
            }
            CheckName::MarginTransfer => {
                Ok(vec![check_margin_transfer(&c.density_spec()?, c.n()?, c.reps()?, c.fresh_m(), &stream)?])
            }
            CheckName::RateMissingMass | CheckName::RateVn | CheckName::RateRn => {
                let quantity = match check {
                    CheckName::RateMissingMass => RateQuantity::MissingMass,
                    CheckName::RateVn => RateQuantity::VolumeFraction,
                    _ => RateQuantity::VertexCount,
                };
                let spec = c.density_spec()?;
                let mode = default_mode(&spec);
                let seed = self.base.fork_named("rate-study");
                let start = Instant::now();
                let study = self.rate_study(&spec)?;
                c.q_list()
                    .into_iter()
                    .map(|q| {
                        let (_, mut r) = evaluate_rate(study, &spec, quantity, q, mode, seed)?;
                        r.runtime_secs = start.elapsed().as_secs_f64();
                        Ok(r)
                    })
                    .collect()
            }
            CheckName::DeviationTail => {
                let spec = c.density_spec()?;
                let n = c.n()?;
                // shift from the rate study of this run, when there is one
                let c_hat = self.study.as_ref().and_then(|s| {
                    let fit = s.fit(RateQuantity::VolumeFraction, 1.0).ok()?;
                    let predicted = (fit.intercept + fit.exponent * (n as f64).ln()).exp();
                    Some(predicted * (n as f64).powf(2.0 / (spec.dim() as f64 + 1.0)))
                });
                let c_hat = if spec.is_uniform() { c_hat } else { None };
                Ok(vec![check_deviation_tail(&spec, n, c.reps()?, c.fresh_m(), c_hat, &stream)?])
            }
            CheckName::AffineInvariance => {
                let body = c.body()?;
                let t = AffineMap::random_shear(
                    body.dim(),
                    c.condition.unwrap_or(DEFAULT_CONDITION),
                    &mut stream.fork_named("transform").rng(),
                )?;
                Ok(vec![check_affine_invariance(&body, &t, c.n()?, c.reps()?, &stream)?])
            }
            CheckName::WorstCaseUniform => {
                let body = c.body()?;
                let rho0 = c.rho0.unwrap_or(1.0);
                let mut roster = vec![
                    DensitySpec::margin_power(body.clone(), 1.0, rho0)?,
                    DensitySpec::margin_power(body.clone(), 2.0, rho0)?,
                ];
                if matches!(body.kind(), crate::geometry::BodyKind::Ball { .. }) {
                    roster.push(DensitySpec::projection(c.projection_source()?, body.dim())?);
                }
                let reps = c.reps()?;
                if reps < MIN_RATE_REPS {
                    return Err(Error::validation("reps", format!("rate checks need at least {MIN_RATE_REPS}")));
                }
                Ok(vec![check_worst_case_uniform(&body, &roster, &c.n_grid()?, reps, &stream)?])
            }
            CheckName::HausdorffDomination => Ok(vec![check_hausdorff_domination(
                c.dim()?,
                c.pairs.unwrap_or(c.reps()?),
                c.n.unwrap_or(30),
                c.fresh_m(),
                &stream,
            )?]),
            CheckName::ProjectionDensity => {
                Ok(vec![check_projection_density(&c.projection_source()?, c.dim()?, c.n()?, &stream)?])
            }
        }
    }
}
