//! One-sample Kolmogorov-Smirnov distance. Reported as a distance only; no
//! p-values, since finite-n discretisation bias makes them misleading here.

use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// `sup_x |F_R(x) - F(x)|` for the empirical CDF `F_R` of `samples`,
/// evaluated at the sample points from both sides.
pub fn ks_distance<F: Fn(f64) -> f64>(samples: &[f64], target_cdf: F) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::EmptySample);
    }
    if samples.iter().any(|x| x.is_nan()) {
        return Err(Error::Grid("NaN in sample".into()));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let r = sorted.len() as f64;
    let d = sorted.iter().enumerate().fold(0.0f64, |acc, (i, &x)| {
        let f = target_cdf(x).clamp(0.0, 1.0);
        let above = (i + 1) as f64 / r - f;
        let below = f - i as f64 / r;
        acc.max(above).max(below)
    });
    Ok(d.clamp(0.0, 1.0))
}

/// CDF of `Normal(mean, variance)`; `variance` must be positive.
pub fn normal_cdf(mean: f64, variance: f64) -> impl Fn(f64) -> f64 {
    let law = Normal::new(mean, variance.sqrt()).expect("positive finite variance");
    move |x| law.cdf(x)
}
