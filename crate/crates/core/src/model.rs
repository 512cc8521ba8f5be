//! Validated income samples and the classical poverty components.
//!
//! Throughout the crate an observation is *poor* when `X <= z` (the poverty
//! line is inclusive) and the empirical CDF is right-continuous, so
//! `F_n(x) = #{i : X_i <= x} / n` also at tied values.

use serde::{Deserialize, Serialize};

use crate::error::{PovError, Result};

/// Nonnegative incomes, sorted ascending, with at least two observations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IncomeSample {
    values: Vec<f64>,
}

impl IncomeSample {
    /// Validates and sorts `values`. The original order is discarded.
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(PovError::TooFewObservations { found: values.len() });
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(PovError::InvalidSample(format!("non-finite income {bad}")));
        }
        let negative: Vec<usize> = values
            .iter()
            .enumerate()
            .filter(|(_, v)| **v < 0.0)
            .map(|(i, _)| i + 1)
            .collect();
        if !negative.is_empty() {
            return Err(PovError::NegativeIncome { rows: negative });
        }
        values.sort_by(|a, b| a.total_cmp(b));
        // -0.0 sorts before 0.0 under total_cmp; normalise so ties stay ties
        for v in values.iter_mut() {
            if *v == 0.0 {
                *v = 0.0;
            }
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Number of observations `<= x`.
    pub fn count_le(&self, x: f64) -> usize {
        self.values.partition_point(|&v| v <= x)
    }

    /// Number of observations strictly below `x`.
    pub fn count_lt(&self, x: f64) -> usize {
        self.values.partition_point(|&v| v < x)
    }

    /// The `q` smallest incomes, i.e. the poor subsample for line `z`.
    pub fn poor(&self, z: PovertyLine) -> &[f64] {
        &self.values[..self.count_le(z.get())]
    }

    /// Same sample with every income multiplied by `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(self.values.iter().map(|v| v * c).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct PovertyLine(f64);

impl PovertyLine {
    pub fn new(z: f64) -> Result<Self> {
        if z.is_finite() && z > 0.0 {
            Ok(Self(z))
        } else {
            Err(PovError::InvalidPovertyLine(z))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for PovertyLine {
    type Error = PovError;
    fn try_from(z: f64) -> Result<Self> {
        Self::new(z)
    }
}

impl From<PovertyLine> for f64 {
    fn from(z: PovertyLine) -> f64 {
        z.0
    }
}

/// Split of a sample at the poverty line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoorPartition {
    pub q: usize,
    pub n: usize,
    pub headcount: f64,
    /// Mean income of the poor; `None` when nobody is poor.
    pub mean_poor: Option<f64>,
}

/// `F_n(x)`: share of the sample at or below `x`.
pub fn empirical_cdf(sample: &IncomeSample, x: f64) -> f64 {
    sample.count_le(x) as f64 / sample.len() as f64
}

pub fn poor_partition(sample: &IncomeSample, z: PovertyLine) -> PoorPartition {
    let poor = sample.poor(z);
    let q = poor.len();
    let n = sample.len();
    let mean_poor = (q > 0).then(|| poor.iter().sum::<f64>() / q as f64);
    PoorPartition {
        q,
        n,
        headcount: q as f64 / n as f64,
        mean_poor,
    }
}

/// Income gap ratio `I = 1 - mu_z / z`.
pub fn income_gap_ratio(partition: &PoorPartition, z: PovertyLine) -> Result<f64> {
    let mu = partition
        .mean_poor
        .ok_or(PovError::NoPoorObservations { found: 0, required: 1 })?;
    Ok((1.0 - mu / z.get()).clamp(0.0, 1.0))
}

/// Gini coefficient of the poor subsample, computed as the mean absolute
/// difference over all ordered pairs divided by twice the poor mean.
pub fn gini_among_poor(sample: &IncomeSample, z: PovertyLine) -> Result<f64> {
    let poor = sample.poor(z);
    let q = poor.len();
    if q == 0 {
        return Err(PovError::NoPoorObservations { found: 0, required: 2 });
    }
    let mean = poor.iter().sum::<f64>() / q as f64;
    if q == 1 || mean <= 0.0 {
        return Err(PovError::DegenerateSubsample);
    }
    // sorted: sum_{i,j} |x_i - x_j| = 2 sum_i (2i - q - 1) x_(i)
    let weighted: f64 = poor
        .iter()
        .enumerate()
        .map(|(i, x)| (2.0 * (i + 1) as f64 - q as f64 - 1.0) * x)
        .sum();
    let qf = q as f64;
    Ok(2.0 * weighted / (2.0 * qf * qf * mean))
}

/// Literal three-component combination `H*I + q/(q+1) * (1 - I) * G_p`.
///
/// Diagnostic only; none of the estimators route through it.
pub fn sen_from_components(partition: &PoorPartition, gap_ratio: f64, gini_poor: f64) -> Result<f64> {
    if partition.q == 0 {
        return Err(PovError::NoPoorObservations { found: 0, required: 1 });
    }
    let q = partition.q as f64;
    Ok(partition.headcount * gap_ratio + q / (q + 1.0) * (1.0 - gap_ratio) * gini_poor)
}
