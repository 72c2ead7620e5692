//! Reproducible random draws from uniform, margin-power and projected laws.

mod density;
mod rng;
mod uniform;

pub use density::{
    density_eval, sample_margin_power, sample_projection, DensityKind, DensitySampler, DensitySpec, MarginParams,
    MarginSample, Normalization, ProjectionSample, NORMALIZATION_POINTS,
};
pub use rng::{RngStream, StreamRng};
pub use uniform::{sample_by_rejection, sample_uniform, UniformSampler, LOW_ACCEPTANCE};
