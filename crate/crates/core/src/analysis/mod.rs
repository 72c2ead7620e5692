//! Replicate engines, estimators and the Monte Carlo checks.

mod checks;
mod moments;
mod rate;
mod replicate;
mod report;
pub mod stats;

pub use checks::{
    check_affine_invariance, check_deviation_tail, check_efron, check_extended_efron, check_hausdorff_domination,
    check_margin_transfer, check_projection_density, check_worst_case_uniform, margin_transfer_case,
    projected_ball_radial_mass, tail_fit, DominationCase, MarginTransferCase, TailFit, CHI2_ALPHA, KS_ALPHA,
    MIN_TAIL_EXCEEDANCES, SIGMA_SLACK, TAIL_MIN_R_SQUARED,
};
pub use moments::{estimate_moment, falling_factorial_mean, MomentEstimate};
pub use rate::{
    check_rate, default_mode, evaluate_rate, fit_power_law, geometric_grid, rate_study, rate_tolerance,
    target_exponent, RateFit, RateMode, RateQuantity, RateStudy, MIN_RATE_REPS, MIN_R_SQUARED, TOL_EXP, TOL_EXP_HIGHER,
};
pub use replicate::{
    map_replicates, run_replicates, run_replicates_with, HullReplicate, Replicate, ReplicateBatch, ReplicateOptions,
    MAX_REDRAWS,
};
pub use report::{CheckReport, ReportRow, Statistic, Uncertainty};
