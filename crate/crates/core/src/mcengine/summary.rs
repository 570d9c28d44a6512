//! Empirical summaries of replicated samples.

use serde::Serialize;

use crate::summation::NeumaierSum;

/// Quantile levels reported for every sample.
pub const QUANTILE_LEVELS: [f64; 7] = [0.01, 0.05, 0.25, 0.5, 0.75, 0.95, 0.99];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub count: usize,
    pub mean: f64,
    /// Unbiased sample variance; `None` for a single observation.
    pub variance: Option<f64>,
    pub skewness: Option<f64>,
    /// `(level, value)` pairs at [`QUANTILE_LEVELS`], linear interpolation
    /// between order statistics.
    pub quantiles: Vec<(f64, f64)>,
}

impl Summary {
    pub fn from_samples(samples: &[f64]) -> Self {
        let count = samples.len();
        assert!(count > 0, "summary of an empty sample");
        let nf = count as f64;
        let mean = crate::summation::sum(samples) / nf;
        let (variance, skewness) = if count > 1 {
            let mut m2 = NeumaierSum::new();
            let mut m3 = NeumaierSum::new();
            for &x in samples {
                let d = x - mean;
                m2.add(d * d);
                m3.add(d * d * d);
            }
            let var = m2.value() / (nf - 1.0);
            let pop_var = m2.value() / nf;
            let skew = if pop_var > 0.0 {
                Some(m3.value() / nf / pop_var.powf(1.5))
            } else {
                None
            };
            (Some(var), skew)
        } else {
            (None, None)
        };
        let mut sorted = samples.to_vec();
        sorted.sort_by(f64::total_cmp);
        let quantiles = QUANTILE_LEVELS
            .iter()
            .map(|&p| (p, quantile_sorted(&sorted, p)))
            .collect();
        Self {
            count,
            mean,
            variance,
            skewness,
            quantiles,
        }
    }

    /// Standard error of the mean.
    pub fn std_error(&self) -> Option<f64> {
        self.variance.map(|v| (v / self.count as f64).sqrt())
    }
}

/// Linear-interpolation quantile (Hyndman-Fan type 7) of sorted data.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Unbiased sample covariance of two equally long samples.
pub fn covariance(a: &[f64], b: &[f64]) -> Option<f64> {
    assert_eq!(a.len(), b.len());
    let n = a.len();
    if n < 2 {
        return None;
    }
    let ma = crate::summation::sum(a) / n as f64;
    let mb = crate::summation::sum(b) / n as f64;
    let s: NeumaierSum = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).collect();
    Some(s.value() / (n - 1) as f64)
}
