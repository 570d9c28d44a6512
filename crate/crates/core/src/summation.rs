//! Neumaier compensated summation.
//!
//! Keeps the rounding error of a running sum at O(eps) independent of the
//! number of terms, which matters when summing up to 10^6 log-ratios of
//! magnitude ~k^(-1/2).

/// Running compensated sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    compensation: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.compensation += (self.sum - t) + v;
        } else {
            self.compensation += (v - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl Extend<f64> for NeumaierSum {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for v in iter {
            self.add(v);
        }
    }
}

impl FromIterator<f64> for NeumaierSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = NeumaierSum::new();
        s.extend(iter);
        s
    }
}

/// Compensated sum of a slice.
pub fn sum(values: &[f64]) -> f64 {
    values.iter().copied().collect::<NeumaierSum>().value()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_small_terms_lost_by_naive_summation() {
        let values = [1.0, 1e100, 1.0, -1e100];
        let naive: f64 = values.iter().sum();
        assert_eq!(naive, 0.0);
        assert_eq!(sum(&values), 2.0);
    }

    #[test]
    fn inverse_sqrt_series_matches_euler_maclaurin() {
        // sum_{k<=N} k^(-1/2) = 2 sqrt(N) + zeta(1/2) + N^(-1/2)/2 - N^(-3/2)/24 + O(N^(-7/2))
        let n = 1_000_000usize;
        let nf = n as f64;
        let zeta_half = -1.460_354_508_809_586_8;
        let reference = 2.0 * nf.sqrt() + zeta_half + 0.5 / nf.sqrt() - 1.0 / (24.0 * nf.powf(1.5));
        let terms: Vec<f64> = (1..=n).map(|k| 1.0 / (k as f64).sqrt()).collect();
        let compensated = sum(&terms);
        assert!((compensated - reference).abs() <= 1e-12 * reference);
    }

    #[test]
    fn empty_sum_is_zero() {
        assert_eq!(sum(&[]), 0.0);
    }
}
