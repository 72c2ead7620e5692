//! Configuration files, the check runner and report output.

pub mod config;
mod run;
mod summary;

pub use config::{BodyName, CheckName, DensityName, ExperimentConfig, Grid, SEED_ENV};
pub use run::{run, write_report_rows, ExperimentReport, OutputPaths, PLOT_HEADER, RESULTS_HEADER};
pub use summary::{report_summary, result_label};
