use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use super::body::{BodyKind, ConvexBody};
use super::point::PointSet;
use super::polytope::Polytope;
use crate::error::{Error, Result};

/// Smallest |det| accepted for an invertible map.
pub const SINGULAR_TOLERANCE: f64 = 1e-9;

/// `x -> matrix · x + shift`
#[derive(Debug, Clone)]
pub struct AffineMap {
    matrix: DMatrix<f64>,
    shift: Vec<f64>,
    inverse_transpose: DMatrix<f64>,
    det: f64,
}

impl AffineMap {
    pub fn new(matrix: DMatrix<f64>, shift: Vec<f64>) -> Result<Self> {
        let d = shift.len();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::DimensionMismatch { expected: d, found: matrix.nrows() });
        }
        let det = matrix.determinant();
        if !(det.abs() > SINGULAR_TOLERANCE) {
            return Err(Error::SingularTransform { det });
        }
        let inverse_transpose = matrix.clone().try_inverse().ok_or(Error::SingularTransform { det })?.transpose();
        Ok(AffineMap { matrix, shift, inverse_transpose, det })
    }

    pub fn identity(d: usize) -> Self {
        Self::new(DMatrix::identity(d, d), vec![0.0; d]).expect("identity is invertible")
    }

    pub fn scaling(d: usize, s: f64) -> Result<Self> {
        Self::new(DMatrix::identity(d, d) * s, vec![0.0; d])
    }

    /// Rotation by `angle` in the plane of the first two coordinates.
    pub fn rotation(d: usize, angle: f64) -> Self {
        let mut m = DMatrix::identity(d, d);
        let (s, c) = angle.sin_cos();
        m[(0, 0)] = c;
        m[(0, 1)] = -s;
        m[(1, 0)] = s;
        m[(1, 1)] = c;
        Self::new(m, vec![0.0; d]).expect("rotations are invertible")
    }

    /// A shear with the given condition number, conjugated by a random
    /// rotation and followed by a random shift in `[-1, 1]^d`.
    pub fn random_shear<R: Rng + ?Sized>(d: usize, condition: f64, rng: &mut R) -> Result<Self> {
        if !(condition >= 1.0) {
            return Err(Error::InvalidArgument(format!("condition number must be >= 1, got {condition}")));
        }
        // I + s e0 e1ᵀ has condition number κ when s = √κ - 1/√κ
        let s = condition.sqrt() - 1.0 / condition.sqrt();
        let mut shear = DMatrix::identity(d, d);
        shear[(0, 1)] = s;
        let q = random_orthogonal(d, rng);
        let matrix = &q * shear * q.transpose();
        let shift = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
        Self::new(matrix, shift)
    }

    pub fn dim(&self) -> usize {
        self.shift.len()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn shift(&self) -> &[f64] {
        &self.shift
    }

    pub fn det(&self) -> f64 {
        self.det
    }

    pub fn condition_number(&self) -> f64 {
        let sv = self.matrix.clone().singular_values();
        let max = sv.iter().cloned().fold(0.0, f64::max);
        let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
        max / min
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let d = self.dim();
        (0..d).map(|r| (0..d).map(|c| self.matrix[(r, c)] * x[c]).sum::<f64>() + self.shift[r]).collect()
    }

    pub fn apply_points(&self, pts: &PointSet) -> Result<PointSet> {
        self.check(pts.dim())?;
        let mut out = PointSet::with_capacity(pts.dim(), pts.len());
        for p in pts.iter() {
            out.push_unchecked(&self.apply(p));
        }
        Ok(out)
    }

    pub fn apply_polytope(&self, p: &Polytope) -> Result<Polytope> {
        self.check(p.dim())?;
        p.mapped(&self.matrix, &self.inverse_transpose, &self.shift)
    }

    pub fn apply_body(&self, k: &ConvexBody) -> Result<ConvexBody> {
        self.check(k.dim())?;
        match k.kind() {
            BodyKind::Ball { center, radius } => ConvexBody::ellipsoid(self.apply(center), &self.matrix * *radius),
            BodyKind::Ellipsoid(e) => ConvexBody::ellipsoid(self.apply(e.center()), &self.matrix * e.shape()),
            BodyKind::Simplex(p) => ConvexBody::simplex(&self.apply_points(p.vertices())?),
            BodyKind::Box { lower, upper } if self.is_diagonal() => {
                let a = self.apply(lower);
                let b = self.apply(upper);
                ConvexBody::cuboid(
                    a.iter().zip(&b).map(|(x, y)| x.min(*y)).collect(),
                    a.iter().zip(&b).map(|(x, y)| x.max(*y)).collect(),
                )
            }
            BodyKind::Box { .. } => {
                let p = k.as_polytope().ok_or_else(|| Error::InvalidPolytope("box corners".into()))?;
                ConvexBody::poly(self.apply_polytope(&p)?)
            }
            BodyKind::Poly(p) => ConvexBody::poly(self.apply_polytope(p)?),
        }
    }

    fn is_diagonal(&self) -> bool {
        let d = self.dim();
        (0..d).all(|r| (0..d).all(|c| r == c || self.matrix[(r, c)] == 0.0))
    }

    fn check(&self, d: usize) -> Result<()> {
        if d != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: d });
        }
        Ok(())
    }
}

/// Haar-distributed orthogonal matrix from the QR factorisation of a
/// Gaussian matrix with the sign convention fixed by diag(R) > 0.
pub fn random_orthogonal<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DMatrix<f64> {
    let g = DMatrix::from_fn(d, d, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for c in 0..d {
        if r[(c, c)] < 0.0 {
            for i in 0..d {
                q[(i, c)] = -q[(i, c)];
            }
        }
    }
    q
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn singular_maps_are_rejected() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        assert!(matches!(AffineMap::new(m, vec![0.0, 0.0]), Err(Error::SingularTransform { .. })));
    }

    #[test]
    fn volumes_scale_by_determinant() {
        let sq = ConvexBody::unit_cube(2).unwrap();
        let t = AffineMap::scaling(2, 2.0).unwrap();
        assert_relative_eq!(t.apply_body(&sq).unwrap().volume(), 4.0);
        let ball = ConvexBody::unit_ball(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let t = AffineMap::random_shear(3, 20.0, &mut rng).unwrap();
        assert_relative_eq!(t.condition_number(), 20.0, epsilon = 1e-9);
        assert_relative_eq!(t.apply_body(&ball).unwrap().volume(), ball.volume() * t.det().abs(), epsilon = 1e-12);
        let tri = ConvexBody::standard_simplex(2).unwrap();
        let img = AffineMap::random_shear(2, 50.0, &mut rng).unwrap().apply_body(&tri).unwrap();
        assert_relative_eq!(img.volume(), 0.5, epsilon = 1e-9);
    }

    #[test]
    fn identity_leaves_points_unchanged() {
        let p = PointSet::from_rows(&[[0.3, 0.4], [1.0, -2.0]]).unwrap();
        assert_eq!(AffineMap::identity(2).apply_points(&p).unwrap(), p);
    }

    #[test]
    fn rotated_box_becomes_polytope() {
        let sq = ConvexBody::unit_cube(2).unwrap();
        let r = AffineMap::rotation(2, 0.3).apply_body(&sq).unwrap();
        assert_eq!(r.kind_name(), "polytope");
        assert_relative_eq!(r.volume(), 1.0, epsilon = 1e-12);
        let p = r.as_polytope().unwrap();
        p.validate().unwrap();
        assert_eq!(p.facets().len(), 4);
    }
}
