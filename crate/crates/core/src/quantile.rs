//! Empirical distribution primitives: interpolated quantiles, the empirical
//! CDF and its left-continuous generalized inverse.
//!
//! The slice-level functions (`*_sorted`) assume an already sorted,
//! non-empty slice and do no validation; they are what the bootstrap loops
//! call. [`Sample`] and [`SortedSample`] wrap them with checked entry points.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One group's outcome observations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    values: Vec<f64>,
    censored: Vec<bool>,
    label: String,
}

impl Sample {
    /// Uncensored sample. Fails on non-finite values.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        let n = values.len();
        Self::with_censoring(values, vec![false; n], "")
    }

    pub fn with_censoring(
        values: Vec<f64>,
        censored: Vec<bool>,
        label: impl Into<String>,
    ) -> Result<Self> {
        if values.len() != censored.len() {
            return Err(Error::CensorLength {
                values: values.len(),
                flags: censored.len(),
            });
        }
        if let Some(&bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::NonFinite(bad));
        }
        Ok(Sample {
            values,
            censored,
            label: label.into(),
        })
    }

    pub fn labeled(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn censored(&self) -> &[bool] {
        &self.censored
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn has_censoring(&self) -> bool {
        self.censored.iter().any(|&c| c)
    }

    /// Applies `f` to every value, keeping flags and label.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::with_censoring(
            self.values.iter().map(|&v| f(v)).collect(),
            self.censored.clone(),
            self.label.clone(),
        )
    }

    pub fn sorted_values(&self) -> Result<Vec<f64>> {
        Ok(self.sorted()?.into_vec())
    }

    pub fn sorted(&self) -> Result<SortedSample> {
        SortedSample::from_values(self.values.clone())
    }

    pub fn quantile(&self, p: f64) -> Result<f64> {
        self.sorted()?.quantile(p)
    }

    pub fn ecdf(&self, x: f64) -> Result<f64> {
        Ok(self.sorted()?.ecdf(x))
    }

    pub fn generalized_inverse(&self, p: f64) -> Result<f64> {
        self.sorted()?.generalized_inverse(p)
    }

    pub fn mean(&self) -> Result<f64> {
        Ok(self.sorted()?.mean())
    }
}

/// Non-empty, nondecreasing, finite values.
#[derive(Debug, Clone, PartialEq)]
pub struct SortedSample(Vec<f64>);

impl SortedSample {
    pub fn from_values(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySample);
        }
        if let Some(&bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::NonFinite(bad));
        }
        sort_values(&mut values);
        Ok(SortedSample(values))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn min(&self) -> f64 {
        self.0[0]
    }

    pub fn max(&self) -> f64 {
        self.0[self.0.len() - 1]
    }

    pub fn quantile(&self, p: f64) -> Result<f64> {
        check_open_level(p)?;
        Ok(quantile_sorted(&self.0, p))
    }

    pub fn ecdf(&self, x: f64) -> f64 {
        ecdf_sorted(&self.0, x)
    }

    /// Level must lie in (0, 1].
    pub fn generalized_inverse(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::LevelOutOfRange(p));
        }
        Ok(generalized_inverse_sorted(&self.0, p))
    }

    pub fn mean(&self) -> f64 {
        mean_sorted(&self.0)
    }
}

pub(crate) fn check_open_level(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::LevelOutOfRange(p))
    }
}

/// Sorts finite values ascending.
pub fn sort_values(values: &mut [f64]) {
    values.sort_unstable_by(f64::total_cmp);
}

/// Linear interpolation between adjacent order statistics at 0-based
/// position `p * (n - 1)`.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    debug_assert!(n > 0);
    if n == 1 {
        return sorted[0];
    }
    let pos = p * (n - 1) as f64;
    let lo = pos.floor() as usize;
    if lo + 1 >= n {
        return sorted[n - 1];
    }
    let frac = pos - lo as f64;
    let (a, b) = (sorted[lo], sorted[lo + 1]);
    // rounding in a + frac*(b - a) can overshoot b by an ulp
    (a + frac * (b - a)).min(b)
}

/// Fraction of values `<= x`.
pub fn ecdf_sorted(sorted: &[f64], x: f64) -> f64 {
    let count = sorted.partition_point(|&v| v <= x);
    count as f64 / sorted.len() as f64
}

/// Smallest order statistic whose ECDF reaches `p`. Levels at or below zero
/// return the minimum.
pub fn generalized_inverse_sorted(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    let nf = n as f64;
    // smallest k in 1..=n with k/n >= p, using the same division ecdf uses
    let (mut lo, mut hi) = (1usize, n);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if (mid as f64 / nf) < p {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    sorted[lo - 1]
}

/// Sum in slice order divided by length.
pub fn mean_sorted(sorted: &[f64]) -> f64 {
    sorted.iter().sum::<f64>() / sorted.len() as f64
}
