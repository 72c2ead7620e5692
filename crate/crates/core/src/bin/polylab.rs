use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use polylab::analysis::fit_power_law;
use polylab::analysis::MomentEstimate;
use polylab::experiment::{report_summary, run, CheckName, ExperimentConfig, ExperimentReport, SEED_ENV};
use polylab::{Error, Result};

#[derive(Parser)]
#[command(name = "polylab", version, about = "Monte Carlo checks for random polytopes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the checks listed in a config file and/or on the command line.
    Run(RunArgs),
    /// Run a single named check.
    Check {
        name: CheckName,
        #[command(flatten)]
        args: RunArgs,
    },
    /// Fit a power law to a CSV with columns n, estimate, stderr.
    Fit { input: PathBuf },
    /// Print the pass/fail table of one or more report.json files.
    Summary { reports: Vec<PathBuf> },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides POLYLAB_SEED and the config file.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    reps: Option<String>,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Adds a check; repeatable.
    #[arg(long = "check")]
    checks: Vec<CheckName>,
    #[arg(long)]
    body: Option<String>,
    #[arg(long)]
    d: Option<String>,
    #[arg(long)]
    n: Option<String>,
    /// Geometric grid `start:stop:xfactor`.
    #[arg(long)]
    n_grid: Option<String>,
    /// Comma-separated moment orders.
    #[arg(long)]
    q: Option<String>,
    #[arg(long)]
    density: Option<String>,
    #[arg(long)]
    gamma: Option<String>,
    #[arg(long)]
    rho0: Option<String>,
    #[arg(long)]
    fresh_m: Option<String>,
}

impl RunArgs {
    fn config(&self, extra: Option<CheckName>) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::from_path(path)?,
            None => ExperimentConfig::default(),
        };
        let overrides = [
            ("body", &self.body),
            ("d", &self.d),
            ("n", &self.n),
            ("n_grid", &self.n_grid),
            ("q", &self.q),
            ("density", &self.density),
            ("density.gamma", &self.gamma),
            ("density.rho0", &self.rho0),
            ("fresh_m", &self.fresh_m),
            ("reps", &self.reps),
        ];
        for (key, value) in overrides {
            if let Some(v) = value {
                cfg.set(key, v)?;
            }
        }
        if let Some(t) = self.threads {
            cfg.threads = Some(t);
        }
        if let Some(dir) = &self.out_dir {
            cfg.out_dir = Some(dir.clone());
        }
        if let Some(c) = extra {
            cfg.checks = vec![c];
        } else if !self.checks.is_empty() {
            cfg.checks = self.checks.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn execute(args: &RunArgs, extra: Option<CheckName>) -> Result<bool> {
    let cfg = args.config(extra)?;
    let seed = cfg.resolve_seed(std::env::var(SEED_ENV).ok().as_deref(), args.seed)?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cfg.threads {
        pool = pool.num_threads(t);
    }
    let pool = pool.build().map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let out_dir = cfg.out_dir();
    let report = pool.install(|| run(&cfg, seed, &out_dir))?;
    print!("{}", report_summary(&report.reports));
    eprintln!("results written to {}", out_dir.display());
    Ok(report.all_pass())
}

fn fit(input: &PathBuf) -> Result<bool> {
    let mut reader = csv::Reader::from_path(input)?;
    let mut grid = Vec::new();
    let mut moments = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let field = |k: usize| -> Result<f64> {
            record.get(k).and_then(|s| s.trim().parse().ok()).ok_or_else(|| Error::Parse {
                line: i + 2,
                column: k + 1,
                message: "expected a number".into(),
            })
        };
        grid.push(field(0)? as usize);
        moments.push(MomentEstimate { q: 1.0, mean: field(1)?, stderr: field(2)?, reps: 0 });
    }
    let fit = fit_power_law(&grid, &moments)?;
    println!("{}", serde_json::to_string_pretty(&fit)?);
    Ok(true)
}

fn summary(paths: &[PathBuf]) -> Result<bool> {
    let mut reports = Vec::new();
    for p in paths {
        reports.extend(ExperimentReport::from_json(p)?.reports);
    }
    print!("{}", report_summary(&reports));
    Ok(reports.iter().all(|r| r.pass))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Run(args) => execute(args, None),
        Command::Check { name, args } => execute(args, Some(*name)),
        Command::Fit { input } => fit(input),
        Command::Summary { reports } => summary(reports),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
