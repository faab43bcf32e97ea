//! Point estimates, confidence intervals and empirical quantiles.

use serde::{Deserialize, Serialize};

/// Two-sided 95% standard-normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// A Monte-Carlo estimate with a 95% confidence interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl Estimate {
    /// Normal-approximation interval for the mean of `samples`.
    pub fn from_samples(samples: &[f64]) -> Estimate {
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        if samples.len() < 2 {
            return Estimate {
                mean,
                ci_low: mean,
                ci_high: mean,
            };
        }
        let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        let half = Z95 * (var / n).sqrt();
        Estimate {
            mean,
            ci_low: mean - half,
            ci_high: mean + half,
        }
    }

    /// Wilson score interval for `successes` out of `trials`.
    pub fn wilson(successes: usize, trials: usize) -> Estimate {
        assert!(trials > 0, "wilson interval needs at least one trial");
        let n = trials as f64;
        let p = successes as f64 / n;
        let z2 = Z95 * Z95;
        let denom = 1.0 + z2 / n;
        let centre = (p + z2 / (2.0 * n)) / denom;
        let half = Z95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
        Estimate {
            mean: p,
            ci_low: (centre - half).max(0.0).min(p),
            ci_high: (centre + half).min(1.0).max(p),
        }
    }

    pub fn width(&self) -> f64 {
        self.ci_high - self.ci_low
    }

    /// True when this interval lies entirely above `other`'s.
    pub fn significantly_above(&self, other: &Estimate) -> bool {
        self.ci_low > other.ci_high
    }

    pub fn overlaps(&self, other: &Estimate) -> bool {
        self.ci_low <= other.ci_high && other.ci_low <= self.ci_high
    }
}

/// Linearly interpolated empirical quantile (R type 7) of unsorted data.
/// `-inf` entries are allowed and sort first.
pub fn quantile(data: &[f64], prob: f64) -> f64 {
    assert!(!data.is_empty(), "quantile of empty data");
    let mut v = data.to_vec();
    v.sort_by(f64::total_cmp);
    quantile_sorted(&v, prob)
}

pub fn quantile_sorted(sorted: &[f64], prob: f64) -> f64 {
    let prob = prob.clamp(0.0, 1.0);
    let h = (sorted.len() - 1) as f64 * prob;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    let (a, b) = (sorted[lo], sorted[hi]);
    if lo == hi || a == b {
        return a;
    }
    if !a.is_finite() {
        return if h - lo as f64 >= 0.5 { b } else { a };
    }
    a + (h - lo as f64) * (b - a)
}

pub fn median(data: &[f64]) -> f64 {
    quantile(data, 0.5)
}
