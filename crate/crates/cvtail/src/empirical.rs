//! Empirical quantiles and survival fractions over simulated draws.

use crate::{Error, Result};

/// Type-7 quantile (linear interpolation between order statistics) of an
/// ascending-sorted slice.
pub fn quantile_type7(sorted: &[f64], p: f64) -> Result<f64> {
    if sorted.is_empty() {
        return Err(Error::invalid("quantile of an empty slice"));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid(format!("quantile level out of [0,1]: {p}")));
    }
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    if lo == hi {
        return Ok(sorted[lo]);
    }
    let w = h - lo as f64;
    Ok(sorted[lo] + (sorted[hi] - sorted[lo]) * w)
}

/// A frozen set of simulated draws with quantile and tail queries.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalDistribution {
    sorted: Vec<f64>,
}

impl EmpiricalDistribution {
    pub fn new(mut draws: Vec<f64>) -> Result<Self> {
        if draws.is_empty() {
            return Err(Error::invalid("empirical distribution needs at least one draw"));
        }
        if draws.iter().any(|v| v.is_nan()) {
            return Err(Error::invalid("empirical distribution draws must not be NaN"));
        }
        draws.sort_unstable_by(f64::total_cmp);
        Ok(Self { sorted: draws })
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn draws(&self) -> &[f64] {
        &self.sorted
    }

    pub fn quantile(&self, p: f64) -> Result<f64> {
        quantile_type7(&self.sorted, p)
    }

    /// Fraction of draws at or above `x`.
    pub fn survival_fraction(&self, x: f64) -> f64 {
        let below = self.sorted.partition_point(|&v| v < x);
        (self.len() - below) as f64 / self.len() as f64
    }

    /// Count of draws `>= x`.
    pub fn count_at_or_above(&self, x: f64) -> usize {
        self.len() - self.sorted.partition_point(|&v| v < x)
    }

    /// Count of draws `<= x`.
    pub fn count_at_or_below(&self, x: f64) -> usize {
        self.sorted.partition_point(|&v| v <= x)
    }

    pub fn mean(&self) -> f64 {
        self.sorted.iter().sum::<f64>() / self.len() as f64
    }
}
