//! Random polytopes built from i.i.d. samples in convex bodies.
//!
//! The crate has four layers:
//!
//! - [`geometry`]: d-dimensional convex hulls, volumes, containment,
//!   point-to-polytope and Hausdorff distances, host bodies and affine maps.
//! - [`sampling`]: reproducible random streams and samplers for uniform,
//!   boundary-vanishing ("margin power") and projected densities.
//! - [`analysis`]: replicate generation, moment estimators and the
//!   Monte Carlo checks (Efron identity and its moment extension, margin
//!   transfer, scaling exponents, exponential tails, affine invariance).
//! - [`experiment`]: the flat key-value configuration format, the runner
//!   that writes CSV/JSON reports, and the summary table used by the
//!   `polylab` binary.
//!
//! Runnable walkthroughs for each capability live in `examples/`.

// `!(x > 0.0)` guards deliberately reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod experiment;
pub mod geometry;
pub mod sampling;

pub use error::{Error, Result};
pub use geometry::{AffineMap, ConvexBody, Point, PointSet, Polytope};
pub use sampling::{DensityKind, DensitySpec, RngStream};
