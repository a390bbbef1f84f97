use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Minimum sample size for fitting three parameters.
pub const MIN_FIT_SIZE: usize = 4;

/// A maximal run of exactly equal consecutive order statistics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TieRun {
    /// Zero-based index of the first member.
    pub start: usize,
    pub len: usize,
}

/// Finite observations in ascending order, with their tie structure.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderedSample<T> {
    values: Vec<T>,
    tie_runs: Vec<TieRun>,
}

impl<T: Scalar> OrderedSample<T> {
    /// Sorts `values`; rejects empty input and non-finite entries.
    pub fn new(mut values: Vec<T>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidSample("sample is empty".into()));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidSample(format!("non-finite value at position {i}")));
        }
        values.sort_by(|a, b| a.partial_cmp(b).expect("finite values are ordered"));
        Ok(Self::from_sorted_unchecked(values))
    }

    /// Wraps values that must already be ascending; verified here.
    pub fn from_sorted(values: Vec<T>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidSample("sample is empty".into()));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidSample(format!("non-finite value at position {i}")));
        }
        if let Some(i) = values.windows(2).position(|w| w[0] > w[1]) {
            return Err(Error::InvalidSample(format!("values not ascending at position {}", i + 1)));
        }
        Ok(Self::from_sorted_unchecked(values))
    }

    fn from_sorted_unchecked(values: Vec<T>) -> Self {
        let mut tie_runs = Vec::new();
        let mut start = 0;
        for i in 1..=values.len() {
            if i == values.len() || values[i] != values[start] {
                if i - start > 1 {
                    tie_runs.push(TieRun { start, len: i - start });
                }
                start = i;
            }
        }
        Self { values, tie_runs }
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn tie_runs(&self) -> &[TieRun] {
        &self.tie_runs
    }

    pub fn has_ties(&self) -> bool {
        !self.tie_runs.is_empty()
    }

    /// Errors unless the sample is large enough to fit three parameters.
    pub fn require_fit_size(&self) -> Result<()> {
        if self.len() < MIN_FIT_SIZE {
            return Err(Error::InvalidSample(format!(
                "fitting needs at least {MIN_FIT_SIZE} observations, got {}",
                self.len()
            )));
        }
        Ok(())
    }

    /// `a * t + b` applied to every observation (`a > 0` keeps the order).
    pub fn affine(&self, a: T, b: T) -> Result<Self> {
        if !(a > T::zero()) {
            return Err(Error::Domain(format!("affine scale must be positive, got {a}")));
        }
        Self::from_sorted(self.values.iter().map(|&t| a * t + b).collect())
    }

    pub fn mean(&self) -> T {
        self.values.iter().copied().sum::<T>() / T::count(self.len())
    }

    /// `sqrt(sum (t - mean)^2 / n)`
    pub fn population_sd(&self) -> T {
        let m = self.mean();
        let ss: T = self.values.iter().map(|&t| (t - m) * (t - m)).sum();
        (ss / T::count(self.len())).sqrt()
    }
}
