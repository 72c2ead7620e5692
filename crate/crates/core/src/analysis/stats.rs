use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};

/// Two-sample Kolmogorov–Smirnov statistic with its asymptotic p-value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsTest {
    pub statistic: f64,
    pub p_value: f64,
}

/// `D = sup |F_a - G_b|`; the p-value uses the Kolmogorov series at
/// `λ = (√m + 0.12 + 0.11/√m) D` with `m = n_a n_b / (n_a + n_b)`.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<KsTest> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    let m = (na * nb / (na + nb)).sqrt();
    Ok(KsTest { statistic: d, p_value: kolmogorov_survival((m + 0.12 + 0.11 / m) * d) })
}

/// `Q(λ) = 2 Σ_{k>=1} (-1)^{k-1} exp(-2 k² λ²)`
pub fn kolmogorov_survival(lambda: f64) -> f64 {
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 2.0;
    for k in 1..=100 {
        let term = sign * (-2.0 * (k * k) as f64 * lambda * lambda).exp();
        sum += term;
        if term.abs() <= 1e-12 * sum.abs() {
            break;
        }
        sign = -sign;
    }
    sum.clamp(0.0, 1.0)
}

/// Pearson goodness-of-fit result.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiSquareTest {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Pearson statistic of `observed` counts against `expected` counts, with
/// `bins - 1 - fitted` degrees of freedom.
pub fn chi_square_gof(observed: &[u64], expected: &[f64], fitted: usize) -> Result<ChiSquareTest> {
    if observed.len() != expected.len() {
        return Err(Error::DimensionMismatch { expected: expected.len(), found: observed.len() });
    }
    if observed.len() < fitted + 2 {
        return Err(Error::InvalidArgument("too few bins for a chi-square test".into()));
    }
    if expected.iter().any(|&e| !(e > 0.0)) {
        return Err(Error::InvalidArgument("expected counts must be positive".into()));
    }
    let statistic: f64 = observed.iter().zip(expected).map(|(&o, &e)| (o as f64 - e).powi(2) / e).sum();
    let dof = observed.len() - 1 - fitted;
    let dist = ChiSquared::new(dof as f64).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    Ok(ChiSquareTest { statistic, dof, p_value: dist.sf(statistic) })
}

/// Straight-line fit `y ≈ intercept + slope · x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
    /// Weighted coefficient of determination, in `[0, 1]`.
    pub r_squared: f64,
}

/// Weighted least squares; `weights = None` is ordinary least squares.
/// The slope error is scaled by the weighted residual variance.
pub fn linear_fit(x: &[f64], y: &[f64], weights: Option<&[f64]>) -> Result<LinearFit> {
    let k = x.len();
    if y.len() != k || weights.is_some_and(|w| w.len() != k) {
        return Err(Error::DimensionMismatch { expected: k, found: y.len() });
    }
    if k < 3 {
        return Err(Error::InvalidArgument("a line fit needs at least 3 points".into()));
    }
    let w = |i: usize| weights.map_or(1.0, |w| w[i]);
    let sw: f64 = (0..k).map(w).sum();
    let xm = (0..k).map(|i| w(i) * x[i]).sum::<f64>() / sw;
    let ym = (0..k).map(|i| w(i) * y[i]).sum::<f64>() / sw;
    let sxx: f64 = (0..k).map(|i| w(i) * (x[i] - xm).powi(2)).sum();
    let sxy: f64 = (0..k).map(|i| w(i) * (x[i] - xm) * (y[i] - ym)).sum();
    let syy: f64 = (0..k).map(|i| w(i) * (y[i] - ym).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(Error::InvalidArgument("abscissae are all equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = ym - slope * xm;
    let ss_res: f64 = (0..k).map(|i| w(i) * (y[i] - intercept - slope * x[i]).powi(2)).sum();
    let r_squared = if syy > 0.0 { (1.0 - ss_res / syy).clamp(0.0, 1.0) } else { 1.0 };
    // residual variance per unit weight, normalised so OLS gets the usual formula
    let sigma2 = ss_res / (k - 2) as f64;
    Ok(LinearFit { slope, intercept, slope_stderr: (sigma2 / sxx).sqrt(), r_squared })
}

/// Linear-interpolated empirical quantile of sorted data.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn exact_power_law_fits_perfectly() {
        let x: Vec<f64> = (0..8).map(|k| (64.0 * 2f64.powi(k)).ln()).collect();
        let y: Vec<f64> = x.iter().map(|lx| -2.0 / 3.0 * lx + 0.7).collect();
        let f = linear_fit(&x, &y, None).unwrap();
        assert_relative_eq!(f.slope, -2.0 / 3.0, epsilon = 1e-12);
        assert_relative_eq!(f.intercept, 0.7, epsilon = 1e-10);
        assert_relative_eq!(f.r_squared, 1.0);
    }

    #[test]
    fn ks_detects_shift_and_accepts_same_law() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a: Vec<f64> = (0..5000).map(|_| rng.random()).collect();
        let b: Vec<f64> = (0..5000).map(|_| rng.random()).collect();
        let c: Vec<f64> = (0..5000).map(|_| rng.random::<f64>() + 0.1).collect();
        assert!(ks_two_sample(&a, &b).unwrap().p_value > 1e-3);
        assert!(ks_two_sample(&a, &c).unwrap().p_value < 1e-6);
        assert_eq!(ks_two_sample(&a, &a).unwrap().statistic, 0.0);
    }

    #[test]
    fn kolmogorov_reference_values() {
        // tabulated: Q(1.36) ≈ 0.0494, Q(1.63) ≈ 0.0098
        assert!((kolmogorov_survival(1.36) - 0.0494).abs() < 5e-4);
        assert!((kolmogorov_survival(1.63) - 0.0098).abs() < 3e-4);
    }

    #[test]
    fn chi_square_of_perfect_fit() {
        let t = chi_square_gof(&[10, 20, 30], &[10.0, 20.0, 30.0], 0).unwrap();
        assert_eq!(t.statistic, 0.0);
        assert_relative_eq!(t.p_value, 1.0);
        assert_eq!(t.dof, 2);
    }
}
