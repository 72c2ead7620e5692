use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Monte Carlo mean of a replicate-level quantity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentEstimate {
    pub q: f64,
    pub mean: f64,
    /// Standard error of `mean`; never negative.
    pub stderr: f64,
    pub reps: usize,
}

impl MomentEstimate {
    /// Sample mean and standard error of `values`, labelled with `q`.
    pub fn from_values(values: impl IntoIterator<Item = f64>, q: f64) -> Result<Self> {
        let mut count = 0usize;
        let mut mean = 0.0;
        let mut m2 = 0.0;
        for v in values {
            count += 1;
            let delta = v - mean;
            mean += delta / count as f64;
            m2 += delta * (v - mean);
        }
        if count == 0 {
            return Err(Error::EmptyInput);
        }
        let stderr = if count > 1 { (m2.max(0.0) / (count - 1) as f64 / count as f64).sqrt() } else { 0.0 };
        Ok(MomentEstimate { q, mean, stderr, reps: count })
    }

    /// `sqrt(se_a² + se_b²)` for independent estimates.
    pub fn combined_stderr(&self, other: &MomentEstimate) -> f64 {
        self.stderr.hypot(other.stderr)
    }
}

/// Mean of `x^q` over `samples` with its plug-in standard error.
pub fn estimate_moment(samples: &[f64], q: f64) -> Result<MomentEstimate> {
    if !(q > 0.0) {
        return Err(Error::InvalidArgument(format!("moment order must be positive, got {q}")));
    }
    if samples.is_empty() {
        return Err(Error::EmptyInput);
    }
    MomentEstimate::from_values(samples.iter().map(|x| x.powf(q)), q)
}

/// Mean of `∏_{j<q} (R - j) / (n + q - j)` where each `R` is the vertex count
/// of a hull of `n + q` points.
pub fn falling_factorial_mean(r_samples: &[usize], n: usize, q: usize) -> Result<MomentEstimate> {
    if q == 0 {
        return Err(Error::InvalidQ(q));
    }
    if r_samples.is_empty() {
        return Err(Error::EmptyInput);
    }
    let total = n + q;
    if let Some(&r) = r_samples.iter().find(|&&r| r > total) {
        return Err(Error::InvalidArgument(format!("vertex count {r} exceeds sample size {total}")));
    }
    MomentEstimate::from_values(r_samples.iter().map(|&r| falling_ratio(r, total, q)), q as f64)
}

/// `∏_{j<q} (r - j) / (total - j)`
pub(crate) fn falling_ratio(r: usize, total: usize, q: usize) -> f64 {
    (0..q).map(|j| (r as f64 - j as f64) / (total - j) as f64).product::<f64>().max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn constant_and_linear_cases() {
        let e = estimate_moment(&[1.5; 10], 2.0).unwrap();
        assert_eq!((e.mean, e.stderr), (2.25, 0.0));
        let e = estimate_moment(&[1.0, 2.0, 3.0, 6.0], 1.0).unwrap();
        assert_relative_eq!(e.mean, 3.0);
        assert!(matches!(estimate_moment(&[], 1.0), Err(Error::EmptyInput)));
    }

    #[test]
    fn second_moment_of_uniform() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let xs: Vec<f64> = (0..100_000).map(|_| rng.random()).collect();
        let e = estimate_moment(&xs, 2.0).unwrap();
        assert!((e.mean - 1.0 / 3.0).abs() <= 3.0 * e.stderr);
    }

    #[test]
    fn falling_factorial_cases() {
        let e = falling_factorial_mean(&[3, 4, 5], 4, 1).unwrap();
        assert_relative_eq!(e.mean, 4.0 / 5.0);
        let e = falling_factorial_mean(&[7; 5], 5, 2).unwrap();
        assert_eq!(e.mean, 1.0);
        assert!(matches!(falling_factorial_mean(&[3], 4, 0), Err(Error::InvalidQ(0))));
    }
}
