use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::AnalyticsError;

/// Mean, median and population variance of a sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub mean: f64,
    pub median: f64,
    pub variance: f64,
    pub std: f64,
}

impl SummaryStats {
    /// Copy with every field rounded to `places` decimals, for display.
    pub fn rounded(&self, places: u32) -> Self {
        Self {
            mean: round_to(self.mean, places),
            median: round_to(self.median, places),
            variance: round_to(self.variance, places),
            std: round_to(self.std, places),
        }
    }
}

/// Variance divides by `n`; the median of an even-length sample is the mean
/// of the two central order statistics.
pub fn summary_stats(values: &[f64]) -> Result<SummaryStats, AnalyticsError> {
    if values.is_empty() {
        return Err(AnalyticsError::EmptyInput);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let variance = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;

    let mut sorted: Vec<f64> = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mid = sorted.len() / 2;
    let median = if sorted.len() % 2 == 0 {
        (sorted[mid - 1] + sorted[mid]) / 2.0
    } else {
        sorted[mid]
    };

    Ok(SummaryStats {
        mean,
        median,
        variance,
        std: libm::sqrt(variance),
    })
}

/// Half-away-from-zero rounding to `places` decimals.
pub fn round_to(x: f64, places: u32) -> f64 {
    let scale = libm::pow(10.0, places as f64);
    libm::round(x * scale) / scale
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12 * b.abs().max(1.0)
    }

    #[test]
    fn four_points() {
        let s = summary_stats(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert!(close(s.mean, 2.5));
        assert!(close(s.median, 2.5));
        assert!(close(s.variance, 1.25));
        assert!(close(s.std, 1.118_033_988_749_895));
    }

    #[test]
    fn constant_input() {
        let s = summary_stats(&[5.0, 5.0, 5.0]).unwrap();
        assert_eq!((s.mean, s.median, s.variance, s.std), (5.0, 5.0, 0.0, 0.0));
    }

    #[test]
    fn odd_median_is_middle() {
        let s = summary_stats(&[9.0, 1.0, 4.0]).unwrap();
        assert_eq!(s.median, 4.0);
    }

    #[test]
    fn sqrt_of_published_variance() {
        assert_eq!(round_to(libm::sqrt(13.0), 4), 3.6056);
        assert_eq!(round_to(libm::sqrt(13.0), 1), 3.6);
    }

    #[test]
    fn empty_is_error() {
        assert_eq!(summary_stats(&[]), Err(AnalyticsError::EmptyInput));
    }

    #[test]
    fn rounding_for_display() {
        assert_eq!(round_to(2.529_822, 1), 2.5);
        assert_eq!(round_to(-0.05, 1), -0.1);
    }
}
