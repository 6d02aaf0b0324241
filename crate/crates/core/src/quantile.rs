//! Five-number summaries and piecewise-linear inverse-CDF sampling.

use alloc::vec::Vec;
use libm::floor;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiveNumberSummary {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QuantileError {
    #[error("no samples")]
    Empty,
    #[error("non-finite sample {0}")]
    NonFinite(f64),
    #[error("quantiles must be finite and nondecreasing: {0:?}")]
    NotMonotone([f64; 5]),
}

/// Linear-interpolation quantile of sorted data (`h = (n - 1) p`).
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = (n - 1) as f64 * p.clamp(0.0, 1.0);
    let lo = floor(h) as usize;
    if lo + 1 >= n {
        return sorted[n - 1];
    }
    let frac = h - lo as f64;
    sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
}

impl FiveNumberSummary {
    pub const PROBABILITIES: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];

    pub fn new(min: f64, q1: f64, median: f64, q3: f64, max: f64) -> Result<Self, QuantileError> {
        let s = Self {
            min,
            q1,
            median,
            q3,
            max,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn constant(v: f64) -> Self {
        Self {
            min: v,
            q1: v,
            median: v,
            q3: v,
            max: v,
        }
    }

    pub fn values(&self) -> [f64; 5] {
        [self.min, self.q1, self.median, self.q3, self.max]
    }

    pub fn validate(&self) -> Result<(), QuantileError> {
        let v = self.values();
        if v.iter().all(|x| x.is_finite()) && v.windows(2).all(|w| w[0] <= w[1]) {
            Ok(())
        } else {
            Err(QuantileError::NotMonotone(v))
        }
    }

    pub fn from_samples(samples: &[f64]) -> Result<Self, QuantileError> {
        if samples.is_empty() {
            return Err(QuantileError::Empty);
        }
        if let Some(bad) = samples.iter().find(|v| !v.is_finite()) {
            return Err(QuantileError::NonFinite(*bad));
        }
        let mut sorted: Vec<f64> = samples.to_vec();
        sorted.sort_unstable_by(f64::total_cmp);
        let q = |p| quantile_sorted(&sorted, p);
        Ok(Self {
            min: sorted[0],
            q1: q(0.25),
            median: q(0.5),
            q3: q(0.75),
            max: sorted[sorted.len() - 1],
        })
    }

    /// Inverse CDF: linear between the five summary points.
    pub fn inverse_cdf(&self, p: f64) -> f64 {
        let v = self.values();
        let h = p.clamp(0.0, 1.0) * 4.0;
        let i = (floor(h) as usize).min(3);
        let frac = h - i as f64;
        (v[i] + frac * (v[i + 1] - v[i])).clamp(self.min, self.max)
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.min && x <= self.max
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn net_fdf_column() {
        let s = FiveNumberSummary::from_samples(&[38.0, 7.0, 15.0, 11.0, 28.0]).unwrap();
        assert_eq!(s.values(), [7.0, 11.0, 15.0, 28.0, 38.0]);
    }

    #[test]
    fn single_value() {
        let s = FiveNumberSummary::from_samples(&[4.2]).unwrap();
        assert_eq!(s, FiveNumberSummary::constant(4.2));
    }

    #[test]
    fn interpolates_between_order_statistics() {
        let s = FiveNumberSummary::from_samples(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(s.q1, 1.75);
        assert_eq!(s.median, 2.5);
        assert_eq!(s.q3, 3.25);
    }

    #[test]
    fn inverse_cdf_hits_knots() {
        let s = FiveNumberSummary::new(7.0, 11.0, 15.0, 28.0, 38.0).unwrap();
        for (p, v) in FiveNumberSummary::PROBABILITIES.iter().zip(s.values()) {
            assert_eq!(s.inverse_cdf(*p), v);
        }
        assert_eq!(s.inverse_cdf(0.125), 9.0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(FiveNumberSummary::new(1.0, 0.0, 2.0, 3.0, 4.0).is_err());
        assert!(FiveNumberSummary::from_samples(&[]).is_err());
        assert!(FiveNumberSummary::from_samples(&[f64::NAN]).is_err());
    }
}
