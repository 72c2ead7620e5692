//! Convex geometry in `R^d`: hulls, volumes, distances and affine maps.

mod affine;
mod body;
mod distance;
mod hull;
mod john;
pub mod linalg;
mod point;
mod polytope;
mod region;
mod steiner;

pub use affine::{random_orthogonal, AffineMap, SINGULAR_TOLERANCE};
pub(crate) use body::ball_margin_integral;
pub use body::{BodyKind, ConvexBody, Ellipsoid, BODY_TOLERANCE};
pub use distance::{distance_to_convex, hausdorff_distance, project, Projection, PROJECTION_TOLERANCE};
pub use hull::{convex_hull, convex_hull_default, default_tolerance, RELATIVE_TOLERANCE};
pub use john::john_ellipsoid_analytic;
pub use point::{Point, PointSet};
pub use polytope::{contains, polytope_volume, Halfspace, Polytope};
pub use region::{symmetric_difference_volume, symmetric_difference_volume_with, Region};
pub use steiner::{steiner_ball_constants, SteinerConstants};
