//! Lorenz values, majorization, Gini index, entropy and total variation.

use crate::birkhoff::ProbabilityVector;
use crate::error::{Result, WalkError};

/// Slack used when comparing Lorenz values.
pub const MAJORIZATION_SLACK: f64 = 1e-12;

/// Cumulative sums of a probability vector taken in ascending order.
#[derive(Debug, Clone, PartialEq)]
pub struct LorenzProfile {
    values: Vec<f64>,
    order: Vec<usize>,
}

impl LorenzProfile {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// The ascending sort permutation; ties keep original index order.
    pub fn order(&self) -> &[usize] {
        &self.order
    }
}

pub fn lorenz(x: &ProbabilityVector) -> LorenzProfile {
    let xs = x.as_slice();
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]).then(a.cmp(&b)));
    let values = order
        .iter()
        .scan(0.0, |acc, &i| {
            *acc += xs[i];
            Some(*acc)
        })
        .collect();
    LorenzProfile { values, order }
}

/// `x` majorizes `y` (x is sparser) when every Lorenz value of `x` is at most that of `y`.
pub fn majorizes(x: &ProbabilityVector, y: &ProbabilityVector) -> Result<bool> {
    WalkError::check_len(x.len(), y.len())?;
    let (lx, ly) = (lorenz(x), lorenz(y));
    Ok(lx
        .values
        .iter()
        .zip(&ly.values)
        .all(|(a, b)| *a <= b + MAJORIZATION_SLACK))
}

/// Gini index from Lorenz values: `1 - 2/(n+1) * sum_a L(a)`.
pub fn gini(x: &ProbabilityVector) -> f64 {
    let n = x.len() as f64;
    let total: f64 = lorenz(x).values.iter().sum();
    1.0 - 2.0 / (n + 1.0) * total
}

/// Gini index from pairwise differences: `sum_{a,b} |x_a - x_b| / (2(n+1))`.
pub fn gini_pairwise(x: &ProbabilityVector) -> f64 {
    let xs = x.as_slice();
    let n = xs.len() as f64;
    let total: f64 = xs
        .iter()
        .map(|a| xs.iter().map(|b| (a - b).abs()).sum::<f64>())
        .sum();
    total / (2.0 * (n + 1.0))
}

/// Upper bound `(n-1)/(n+1)` of the Gini index, attained by certain vectors.
pub fn gini_max(n: usize) -> f64 {
    (n as f64 - 1.0) / (n as f64 + 1.0)
}

/// Shannon entropy in nats, with `0 ln 0 = 0`.
pub fn entropy(x: &ProbabilityVector) -> f64 {
    -x.as_slice()
        .iter()
        .filter(|&&v| v > 0.0)
        .map(|&v| v * v.ln())
        .sum::<f64>()
}

/// Shannon entropy in bits, for display.
pub fn entropy_bits(x: &ProbabilityVector) -> f64 {
    entropy(x) / std::f64::consts::LN_2
}

/// Total variation distance `(1/2) sum_a |x_a - y_a|`.
pub fn tv_distance(x: &ProbabilityVector, y: &ProbabilityVector) -> Result<f64> {
    WalkError::check_len(x.len(), y.len())?;
    Ok(0.5
        * x.as_slice()
            .iter()
            .zip(y.as_slice())
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>())
}

/// Distance to the uniform vector of the same length.
pub fn tv_to_uniform(x: &ProbabilityVector) -> f64 {
    let u = 1.0 / x.len() as f64;
    0.5 * x.as_slice().iter().map(|a| (a - u).abs()).sum::<f64>()
}
