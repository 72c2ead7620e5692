use super::linalg::{binomial, unit_ball_volume};

/// Steiner-formula data for the Euclidean unit ball in dimension `d`.
///
/// `Vol(B + λB) - Vol(B) = Σ_{j=1..d} L_j λ^j` with `L_j = C(d, j) β_d`.
/// `alpha1 = Σ L_j 2^j` bounds `|G △ G'| / d_H(G, G')` for convex `G, G'`
/// inside the unit ball; `alpha2 = Σ L_j` bounds the excess divided by `λ`
/// for `λ <= 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SteinerConstants {
    pub dim: usize,
    /// `L_1 ..= L_d`
    pub coefficients: Vec<f64>,
    /// `β_d (3^d - 1)`
    pub alpha1: f64,
    /// `β_d (2^d - 1)`
    pub alpha2: f64,
}

impl SteinerConstants {
    /// `Σ L_j λ^j`
    pub fn excess_volume(&self, lambda: f64) -> f64 {
        self.coefficients.iter().enumerate().map(|(j, l)| l * lambda.powi(j as i32 + 1)).sum()
    }
}

pub fn steiner_ball_constants(d: usize) -> SteinerConstants {
    let beta = unit_ball_volume(d);
    SteinerConstants {
        dim: d,
        coefficients: (1..=d).map(|j| binomial(d, j) * beta).collect(),
        alpha1: beta * (3f64.powi(d as i32) - 1.0),
        alpha2: beta * (2f64.powi(d as i32) - 1.0),
    }
}
