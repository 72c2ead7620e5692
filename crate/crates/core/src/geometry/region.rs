use rand::Rng;

use super::body::{ConvexBody, BODY_TOLERANCE};
use super::polytope::Polytope;
use crate::analysis::MomentEstimate;
use crate::error::{Error, Result};
use crate::sampling::RngStream;

/// A measurable set with a membership oracle.
pub trait Region {
    fn dim(&self) -> usize;
    fn contains_point(&self, x: &[f64]) -> bool;
    /// Axis-aligned box containing the set, when one is known.
    fn bounding_box(&self) -> Option<(Vec<f64>, Vec<f64>)>;
}

impl Region for ConvexBody {
    fn dim(&self) -> usize {
        ConvexBody::dim(self)
    }

    fn contains_point(&self, x: &[f64]) -> bool {
        self.contains_unchecked(x, BODY_TOLERANCE * self.scale())
    }

    fn bounding_box(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        Some(ConvexBody::bounding_box(self))
    }
}

impl Region for Polytope {
    fn dim(&self) -> usize {
        Polytope::dim(self)
    }

    fn contains_point(&self, x: &[f64]) -> bool {
        self.contains_unchecked(x, self.tolerance())
    }

    fn bounding_box(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        Some(Polytope::bounding_box(self))
    }
}

/// Monte Carlo estimate of `|G △ H|` from `m` uniform points in the smallest
/// box containing every box the operands expose. Operands without a box are
/// assumed to lie inside the other's.
pub fn symmetric_difference_volume(
    g: &dyn Region,
    h: &dyn Region,
    m: usize,
    rng: &RngStream,
) -> Result<MomentEstimate> {
    symmetric_difference_volume_with(g, h, m, &mut rng.rng())
}

pub fn symmetric_difference_volume_with<R: Rng + ?Sized>(
    g: &dyn Region,
    h: &dyn Region,
    m: usize,
    rng: &mut R,
) -> Result<MomentEstimate> {
    if g.dim() != h.dim() {
        return Err(Error::DimensionMismatch { expected: g.dim(), found: h.dim() });
    }
    if m == 0 {
        return Err(Error::InvalidArgument("symmetric difference needs m >= 1".into()));
    }
    let (lo, hi) = match (g.bounding_box(), h.bounding_box()) {
        (Some((l1, u1)), Some((l2, u2))) => (
            l1.iter().zip(&l2).map(|(a, b)| a.min(*b)).collect::<Vec<_>>(),
            u1.iter().zip(&u2).map(|(a, b)| a.max(*b)).collect::<Vec<_>>(),
        ),
        (Some(b), None) | (None, Some(b)) => b,
        (None, None) => return Err(Error::NoBoundingBox),
    };
    let box_volume: f64 = lo.iter().zip(&hi).map(|(l, u)| u - l).product();
    let mut x = vec![0.0; lo.len()];
    let mut hits = 0usize;
    for _ in 0..m {
        for (k, xk) in x.iter_mut().enumerate() {
            *xk = lo[k] + (hi[k] - lo[k]) * rng.random::<f64>();
        }
        if g.contains_point(&x) != h.contains_point(&x) {
            hits += 1;
        }
    }
    let p = hits as f64 / m as f64;
    Ok(MomentEstimate { q: 1.0, mean: box_volume * p, stderr: box_volume * (p * (1.0 - p) / m as f64).sqrt(), reps: m })
}
