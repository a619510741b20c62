//! Small statistics toolkit: integer moment accumulators, Wilson intervals
//! and chi-square tests.

use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Running count, sum and sum of squares of a nonnegative integer
/// statistic. Merging is exact, so any merge order gives the same result.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct IntMoments {
    pub count: u64,
    pub sum: u128,
    pub sum_sq: u128,
}

impl IntMoments {
    pub fn push(&mut self, x: u64) {
        self.count += 1;
        self.sum += u128::from(x);
        self.sum_sq += u128::from(x) * u128::from(x);
    }

    pub fn merge(&mut self, other: &Self) {
        self.count += other.count;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
    }

    pub fn mean(&self) -> f64 {
        if self.count == 0 {
            return f64::NAN;
        }
        self.sum as f64 / self.count as f64
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            return 0.0;
        }
        let n = self.count as f64;
        // n * sum_sq - sum^2 is exact in integers
        let num = (self.count as u128) * self.sum_sq - self.sum * self.sum;
        num as f64 / (n * (n - 1.0))
    }

    /// Standard error of the mean.
    pub fn stderr(&self) -> f64 {
        if self.count == 0 {
            return f64::NAN;
        }
        (self.variance() / self.count as f64).sqrt()
    }
}

/// Wilson score interval for a binomial proportion, clamped to `[0, 1]`.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: u64,
    pub p_value: f64,
}

impl ChiSquare {
    fn from_statistic(statistic: f64, dof: u64) -> Self {
        let p_value = if dof == 0 {
            1.0
        } else {
            let dist = ChiSquared::new(dof as f64).expect("dof > 0");
            (1.0 - dist.cdf(statistic)).clamp(0.0, 1.0)
        };
        Self {
            statistic,
            dof,
            p_value,
        }
    }

    pub fn passes(&self, alpha: f64) -> bool {
        self.p_value >= alpha
    }
}

/// Pearson goodness-of-fit of `observed` counts against cell probabilities.
/// Cells with zero expected probability must have zero counts and are dropped.
pub fn chi_square_gof(observed: &[u64], probs: &[f64]) -> ChiSquare {
    assert_eq!(observed.len(), probs.len(), "cell count mismatch");
    let total: u64 = observed.iter().sum();
    let n = total as f64;
    let mut stat = 0.0;
    let mut cells = 0u64;
    for (&o, &p) in observed.iter().zip(probs) {
        if p <= 0.0 {
            if o > 0 {
                return ChiSquare {
                    statistic: f64::INFINITY,
                    dof: 0,
                    p_value: 0.0,
                };
            }
            continue;
        }
        let e = n * p;
        stat += (o as f64 - e).powi(2) / e;
        cells += 1;
    }
    ChiSquare::from_statistic(stat, cells.saturating_sub(1))
}

/// Pearson test of homogeneity between two histograms over the same cells.
/// Cells empty in both samples are dropped.
pub fn chi_square_two_sample(a: &[u64], b: &[u64]) -> ChiSquare {
    assert_eq!(a.len(), b.len(), "cell count mismatch");
    let na: u64 = a.iter().sum();
    let nb: u64 = b.iter().sum();
    let total = (na + nb) as f64;
    let mut stat = 0.0;
    let mut cells = 0u64;
    for (&x, &y) in a.iter().zip(b) {
        let col = (x + y) as f64;
        if col == 0.0 {
            continue;
        }
        let ea = na as f64 * col / total;
        let eb = nb as f64 * col / total;
        stat += (x as f64 - ea).powi(2) / ea + (y as f64 - eb).powi(2) / eb;
        cells += 1;
    }
    ChiSquare::from_statistic(stat, cells.saturating_sub(1))
}

/// `x (x-1) ... (x-r+1)`; zero once `r > x`.
pub fn falling_factorial(x: u64, r: u32) -> u128 {
    (0..u64::from(r))
        .map(|i| u128::from(x.saturating_sub(i)))
        .product()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moments() {
        let mut m = IntMoments::default();
        for x in [1, 2, 3, 4] {
            m.push(x);
        }
        assert_eq!(m.mean(), 2.5);
        assert!((m.variance() - 5.0 / 3.0).abs() < 1e-15);
        assert!((m.stderr() - (5.0 / 12.0f64).sqrt()).abs() < 1e-15);

        let mut a = IntMoments::default();
        a.push(1);
        a.push(2);
        let mut b = IntMoments::default();
        b.push(3);
        b.push(4);
        a.merge(&b);
        assert_eq!(a, m);
    }

    #[test]
    fn wilson_bounds() {
        let (lo, hi) = wilson_interval(0, 10, Z95);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0 && hi < 0.35);
        let (lo, hi) = wilson_interval(10, 10, Z95);
        assert!(lo > 0.65 && hi > 1.0 - 1e-12 && hi <= 1.0);
        // textbook value: 8/10 -> (0.4902, 0.9433)
        let (lo, hi) = wilson_interval(8, 10, Z95);
        assert!((lo - 0.4902).abs() < 1e-4 && (hi - 0.9433).abs() < 1e-4);
    }

    #[test]
    fn chi_square_values() {
        let c = chi_square_gof(&[10, 10, 10], &[1.0 / 3.0; 3]);
        assert!(c.statistic.abs() < 1e-12);
        assert_eq!(c.dof, 2);
        assert!((c.p_value - 1.0).abs() < 1e-12);
        let c = chi_square_gof(&[20, 10, 0], &[0.5, 0.5, 0.0]);
        assert_eq!(c.dof, 1);
        assert!((c.statistic - 10.0 / 3.0).abs() < 1e-12);
        let c = chi_square_gof(&[1, 1], &[1.0, 0.0]);
        assert_eq!(c.p_value, 0.0);

        let c = chi_square_two_sample(&[10, 20, 0], &[10, 20, 0]);
        assert_eq!((c.statistic, c.dof), (0.0, 1));
        // statistic 2.0 on 2 dof has p = exp(-1)
        let c = ChiSquare::from_statistic(2.0, 2);
        assert!((c.p_value - (-1.0f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn falling() {
        assert_eq!(falling_factorial(5, 0), 1);
        assert_eq!(falling_factorial(5, 2), 20);
        assert_eq!(falling_factorial(2, 3), 0);
        assert_eq!(falling_factorial(0, 1), 0);
    }
}
