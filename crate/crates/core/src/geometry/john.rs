use nalgebra::{DMatrix, DVector};

use super::body::{BodyKind, ConvexBody};
use super::point::Point;
use crate::error::{Error, Result};

/// Maximum-volume inscribed ellipsoid `{center + shape · u : |u| <= 1}` for
/// bodies where it has a closed form. Its d-fold dilation about the centre
/// contains the body.
///
/// For a simplex with vertices `v_i` and centroid `g` the shape is the
/// Cholesky factor of `Σ (v_i - g)(v_i - g)ᵀ / (d (d + 1))`: the affine image
/// of the inscribed ball of a regular simplex.
pub fn john_ellipsoid_analytic(k: &ConvexBody) -> Result<(Point, DMatrix<f64>)> {
    let d = k.dim();
    match k.kind() {
        BodyKind::Ball { center, radius } => Ok((Point(center.clone()), DMatrix::identity(d, d) * *radius)),
        BodyKind::Ellipsoid(e) => Ok((Point(e.center().to_vec()), e.shape().clone())),
        BodyKind::Box { lower, upper } => {
            let center = lower.iter().zip(upper).map(|(l, u)| 0.5 * (l + u)).collect();
            let half = DVector::from_iterator(d, lower.iter().zip(upper).map(|(l, u)| 0.5 * (u - l)));
            Ok((Point(center), DMatrix::from_diagonal(&half)))
        }
        BodyKind::Simplex(p) => {
            let verts = p.vertices();
            let mut g = vec![0.0; d];
            for v in verts.iter() {
                g.iter_mut().zip(v).for_each(|(a, b)| *a += b / (d + 1) as f64);
            }
            let mut cov = DMatrix::zeros(d, d);
            for v in verts.iter() {
                let dv = DVector::from_iterator(d, v.iter().zip(&g).map(|(a, b)| a - b));
                cov += &dv * dv.transpose();
            }
            cov /= (d * (d + 1)) as f64;
            let chol = cov.cholesky().ok_or_else(|| Error::InvalidArgument("simplex is degenerate".into()))?;
            Ok((Point(g), chol.l()))
        }
        BodyKind::Poly(_) => Err(Error::Unsupported("John ellipsoid of a general polytope".into())),
    }
}
