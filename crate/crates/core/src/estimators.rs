//! Point estimators for the Sen and SST indices and their asymptotic variances.
//!
//! With `X_(1) <= ... <= X_(n)` the sorted sample and `q` the number of
//! observations at or below `z`:
//!
//! ```text
//! Sen plug-in      (2 / (n q z))        sum_{i<=q} (z - X_(i)) (q - i)
//! Sen Davidson     (2 / (n q z))        sum_{i<=q} (z - X_(i)) (q - i + 1/2)
//! Sen U-statistic  (2 / z) U1 / U2
//! SST plug-in      (2 / (n^2 z))        sum_{i<=q} (n - i) (z - X_(i))
//! SST Davidson     (2 / (n^2 z))        sum_{i<=q} (n - i + 1/2) (z - X_(i))
//! SST U-statistic  (2 / (n (n - 1) z))  sum_{i<=q} (n - i) (z - X_(i))
//! ```
//!
//! `U1` and `U2` average the kernels `psi1` and `psi2` over all unordered
//! pairs, and the SST U-statistic is the pair average of `psi3`.

use serde::{Deserialize, Serialize};

use crate::error::{PovError, Result};
use crate::interval::{check_alpha, CiDiagnostics, CiMethod, ConfidenceInterval};
use crate::model::{IncomeSample, PovertyLine};
use crate::normal::normal_quantile;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IndexKind {
    Sen,
    Sst,
}

impl IndexKind {
    pub const ALL: [IndexKind; 2] = [IndexKind::Sen, IndexKind::Sst];

    pub fn as_str(self) -> &'static str {
        match self {
            IndexKind::Sen => "sen",
            IndexKind::Sst => "sst",
        }
    }
}

impl std::fmt::Display for IndexKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for IndexKind {
    type Err = PovError;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "sen" => Ok(IndexKind::Sen),
            "sst" => Ok(IndexKind::Sst),
            other => Err(PovError::Config(format!("unknown index {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EstimatorMethod {
    #[serde(rename = "plugin")]
    PlugIn,
    #[serde(rename = "davidson")]
    Davidson,
    #[serde(rename = "ustat")]
    UStat,
}

impl EstimatorMethod {
    pub const ALL: [EstimatorMethod; 3] =
        [EstimatorMethod::UStat, EstimatorMethod::PlugIn, EstimatorMethod::Davidson];

    pub fn as_str(self) -> &'static str {
        match self {
            EstimatorMethod::PlugIn => "plugin",
            EstimatorMethod::Davidson => "davidson",
            EstimatorMethod::UStat => "ustat",
        }
    }
}

impl std::fmt::Display for EstimatorMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for EstimatorMethod {
    type Err = PovError;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "plugin" | "plug-in" => Ok(EstimatorMethod::PlugIn),
            "davidson" => Ok(EstimatorMethod::Davidson),
            "ustat" | "u-stat" => Ok(EstimatorMethod::UStat),
            other => Err(PovError::Config(format!("unknown estimator {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndexEstimate {
    pub index_kind: IndexKind,
    pub method: EstimatorMethod,
    pub value: f64,
    pub n: usize,
    pub q: usize,
    pub z: f64,
    /// Set when no observation lies at or below the line; `value` is then 0.
    pub no_poor: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UStatComponents {
    pub u1: f64,
    pub u2: f64,
    pub pair_count: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "index", rename_all = "lowercase")]
pub enum VarianceComponents {
    Sen { sigma1_sq: f64, sigma2_sq: f64, sigma12: f64 },
    Sst { sigma2_sq: f64 },
}

/// Plug-in estimate of the limiting variance of `sqrt(n) (estimate - index)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticVariance {
    pub sigma_sq: f64,
    pub components: VarianceComponents,
}

/// `(z - a) I(a < b <= z) + (z - b) I(b < a <= z)`, halved.
#[inline]
pub fn psi1(a: f64, b: f64, z: f64) -> f64 {
    let mut v = 0.0;
    if a < b && b <= z {
        v += z - a;
    }
    if b < a && a <= z {
        v += z - b;
    }
    0.5 * v
}

#[inline]
pub fn psi2(a: f64, b: f64, z: f64) -> f64 {
    0.5 * ((a <= z) as u8 as f64 + (b <= z) as u8 as f64)
}

/// `I(min <= z) (1 - min / z)` with `min = min(a, b)`.
#[inline]
pub fn psi3(a: f64, b: f64, z: f64) -> f64 {
    let m = a.min(b);
    if m <= z {
        1.0 - m / z
    } else {
        0.0
    }
}

fn pair_count(n: usize) -> u64 {
    let n = n as u64;
    n * (n - 1) / 2
}

fn make(sample: &IncomeSample, z: PovertyLine, kind: IndexKind, method: EstimatorMethod, value: f64) -> IndexEstimate {
    let q = sample.count_le(z.get());
    IndexEstimate {
        index_kind: kind,
        method,
        // an empty float sum is -0.0
        value: if q == 0 { 0.0 } else { value },
        n: sample.len(),
        q,
        z: z.get(),
        no_poor: q == 0,
    }
}

/// `sum_{i<=q} (z - X_(i)) (w(i))` over the poor order statistics, 1-based `i`.
fn weighted_gap_sum(sample: &IncomeSample, z: PovertyLine, weight: impl Fn(usize) -> f64) -> f64 {
    let zv = z.get();
    sample
        .poor(z)
        .iter()
        .enumerate()
        .map(|(i, x)| (zv - x) * weight(i + 1))
        .sum()
}

pub fn sen_plugin(sample: &IncomeSample, z: PovertyLine) -> IndexEstimate {
    let n = sample.len() as f64;
    let q = sample.count_le(z.get());
    let value = if q == 0 {
        0.0
    } else {
        let qf = q as f64;
        2.0 / (n * qf * z.get()) * weighted_gap_sum(sample, z, |i| qf - i as f64)
    };
    make(sample, z, IndexKind::Sen, EstimatorMethod::PlugIn, value)
}

pub fn sen_davidson(sample: &IncomeSample, z: PovertyLine) -> IndexEstimate {
    let n = sample.len() as f64;
    let q = sample.count_le(z.get());
    let value = if q == 0 {
        0.0
    } else {
        let qf = q as f64;
        2.0 / (n * qf * z.get()) * weighted_gap_sum(sample, z, |i| qf - i as f64 + 0.5)
    };
    make(sample, z, IndexKind::Sen, EstimatorMethod::Davidson, value)
}

/// Exact pair averages of `psi1` and `psi2`; O(n^2).
pub fn sen_ustat_kernel(sample: &IncomeSample, z: PovertyLine) -> UStatComponents {
    let x = sample.values();
    let zv = z.get();
    let (mut s1, mut s2) = (0.0, 0.0);
    for i in 0..x.len() {
        for j in 0..i {
            s1 += psi1(x[i], x[j], zv);
            s2 += psi2(x[i], x[j], zv);
        }
    }
    let m = pair_count(x.len());
    UStatComponents {
        u1: s1 / m as f64,
        u2: s2 / m as f64,
        pair_count: m,
    }
}

/// `U1` and `U2` from order statistics in O(n log n); tie-aware.
///
/// Each poor `X_i` pairs through `psi1` with every `X_j` in `(X_i, z]`, and
/// `U2` reduces to `q / n`.
pub fn sen_ustat_components(sample: &IncomeSample, z: PovertyLine) -> UStatComponents {
    let zv = z.get();
    let n = sample.len();
    let q = sample.count_le(zv);
    let poor = sample.poor(z);
    let mut half_sum = 0.0;
    let mut i = 0;
    while i < q {
        // group ties so that each counts only strictly larger poor incomes
        let mut j = i;
        while j < q && poor[j] == poor[i] {
            j += 1;
        }
        half_sum += (zv - poor[i]) * (j - i) as f64 * (q - j) as f64;
        i = j;
    }
    let m = pair_count(n);
    UStatComponents {
        u1: 0.5 * half_sum / m as f64,
        u2: q as f64 / n as f64,
        pair_count: m,
    }
}

fn poor_has_ties(sample: &IncomeSample, z: PovertyLine) -> bool {
    sample.poor(z).windows(2).any(|w| w[0] == w[1])
}

/// U-statistic Sen estimator `(2 / z) U1 / U2`.
///
/// Without ties among the poor this is the order-statistic form
/// `(1 / ((n - 1) q z)) sum_{i<=q} (z (q - 1) - 2 (q - i) X_(i))`; with ties the
/// kernel definition (strict `X1 < X2`) is evaluated instead.
pub fn sen_ustat(sample: &IncomeSample, z: PovertyLine) -> IndexEstimate {
    let n = sample.len() as f64;
    let zv = z.get();
    let q = sample.count_le(zv);
    let value = if q == 0 {
        0.0
    } else if !poor_has_ties(sample, z) {
        let qf = q as f64;
        let total: f64 = sample
            .poor(z)
            .iter()
            .enumerate()
            .map(|(i, x)| zv * (qf - 1.0) - 2.0 * (qf - (i + 1) as f64) * x)
            .sum();
        total / ((n - 1.0) * qf * zv)
    } else {
        let c = sen_ustat_components(sample, z);
        2.0 / zv * c.u1 / c.u2
    };
    make(sample, z, IndexKind::Sen, EstimatorMethod::UStat, value)
}

pub fn sst_plugin(sample: &IncomeSample, z: PovertyLine) -> IndexEstimate {
    let n = sample.len() as f64;
    let value = 2.0 / (n * n * z.get()) * weighted_gap_sum(sample, z, |i| n - i as f64);
    make(sample, z, IndexKind::Sst, EstimatorMethod::PlugIn, value)
}

pub fn sst_davidson(sample: &IncomeSample, z: PovertyLine) -> IndexEstimate {
    let n = sample.len() as f64;
    let value = 2.0 / (n * n * z.get()) * weighted_gap_sum(sample, z, |i| n - i as f64 + 0.5);
    make(sample, z, IndexKind::Sst, EstimatorMethod::Davidson, value)
}

/// Unbiased SST estimator; closed form over the order statistics.
pub fn sst_ustat(sample: &IncomeSample, z: PovertyLine) -> IndexEstimate {
    let n = sample.len() as f64;
    let value = 2.0 / (n * (n - 1.0) * z.get()) * weighted_gap_sum(sample, z, |i| n - i as f64);
    make(sample, z, IndexKind::Sst, EstimatorMethod::UStat, value)
}

/// Pair average of `psi3`; O(n^2) reference path for [`sst_ustat`].
pub fn sst_ustat_kernel(sample: &IncomeSample, z: PovertyLine) -> f64 {
    let x = sample.values();
    let zv = z.get();
    let mut s = 0.0;
    for i in 0..x.len() {
        for j in 0..i {
            s += psi3(x[i], x[j], zv);
        }
    }
    s / pair_count(x.len()) as f64
}

pub fn estimate(sample: &IncomeSample, z: PovertyLine, kind: IndexKind, method: EstimatorMethod) -> IndexEstimate {
    match (kind, method) {
        (IndexKind::Sen, EstimatorMethod::PlugIn) => sen_plugin(sample, z),
        (IndexKind::Sen, EstimatorMethod::Davidson) => sen_davidson(sample, z),
        (IndexKind::Sen, EstimatorMethod::UStat) => sen_ustat(sample, z),
        (IndexKind::Sst, EstimatorMethod::PlugIn) => sst_plugin(sample, z),
        (IndexKind::Sst, EstimatorMethod::Davidson) => sst_davidson(sample, z),
        (IndexKind::Sst, EstimatorMethod::UStat) => sst_ustat(sample, z),
    }
}

/// Prefix sums `P[k] = X_(1) + ... + X_(k)`.
fn prefix_sums(values: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len() + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for v in values {
        acc += v;
        out.push(acc);
    }
    out
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Population-style (divisor n) variance.
fn variance(v: &[f64]) -> f64 {
    let m = mean(v);
    v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / v.len() as f64
}

/// Plug-in limiting variance of the Sen U-statistic estimator:
///
/// ```text
/// sigma^2 = (16 / z^2) [ s1 / F^2 + D1^2 s2 / F^4 - 2 D1 s12 / F^3 ]
/// ```
///
/// with `F = F_n(z)`, `D1 = U1` and `(s1, s12, s2)` the empirical covariance
/// (divisor n) of the first-order projections
///
/// ```text
/// g1(x) = (1/n) sum_j psi1(x, X_j)
///       = (1 / 2n) [ (z - x) #{x < X_j <= z} + sum_{X_j < x} (z - X_j) ]   for x <= z, else 0
/// g2(x) = I(x <= z) / 2
/// ```
///
/// so that `s2 = F (1 - F) / 4`. The bracket is `Var_n(g1 / F - D1 g2 / F^2)`,
/// which is how `sigma^2` is evaluated.
pub fn sen_asymptotic_variance(sample: &IncomeSample, z: PovertyLine) -> Result<AsymptoticVariance> {
    let zv = z.get();
    let x = sample.values();
    let nf = x.len() as f64;
    let q = sample.count_le(zv);
    if q == 0 {
        return Err(PovError::NoPoorObservations { found: 0, required: 1 });
    }
    let fz = q as f64 / nf;
    let prefix = prefix_sums(x);
    let g1: Vec<f64> = x
        .iter()
        .map(|&xi| {
            if xi > zv {
                return 0.0;
            }
            let above = (q - sample.count_le(xi)) as f64;
            let lt = sample.count_lt(xi);
            ((zv - xi) * above + zv * lt as f64 - prefix[lt]) / (2.0 * nf)
        })
        .collect();
    // sorted sample: the first q entries are the poor ones
    let g2: Vec<f64> = (0..x.len()).map(|i| if i < q { 0.5 } else { 0.0 }).collect();
    let (m1, m2) = (mean(&g1), mean(&g2));
    let sigma1_sq = variance(&g1);
    let sigma2_sq = variance(&g2);
    let sigma12 = g1.iter().zip(&g2).map(|(a, b)| (a - m1) * (b - m2)).sum::<f64>() / nf;
    let d1 = sen_ustat_components(sample, z).u1;
    let influence: Vec<f64> = g1.iter().zip(&g2).map(|(a, b)| a / fz - d1 * b / (fz * fz)).collect();
    Ok(AsymptoticVariance {
        sigma_sq: 16.0 / (zv * zv) * variance(&influence),
        components: VarianceComponents::Sen { sigma1_sq, sigma2_sq, sigma12 },
    })
}

/// `4 Var_n(g2)` where `g2(x)` is the empirical projection `E[psi3(x, X)]`:
///
/// ```text
/// x >  z:  F_n(z) - (1 / (n z)) sum_{X_j <= z} X_j
/// x <= z:  1 - (1 / z) [ x (1 - F_n(x)) + (1 / n) sum_{X_j <= x} X_j ]
/// ```
pub fn sst_asymptotic_variance(sample: &IncomeSample, z: PovertyLine) -> AsymptoticVariance {
    let zv = z.get();
    let x = sample.values();
    let nf = x.len() as f64;
    let q = sample.count_le(zv);
    let prefix = prefix_sums(x);
    let above = q as f64 / nf - prefix[q] / (nf * zv);
    let g2: Vec<f64> = x
        .iter()
        .map(|&xi| {
            if xi > zv {
                above
            } else {
                let k = sample.count_le(xi);
                1.0 - (xi * (1.0 - k as f64 / nf) + prefix[k] / nf) / zv
            }
        })
        .collect();
    let sigma2_sq = variance(&g2);
    AsymptoticVariance {
        sigma_sq: 4.0 * sigma2_sq,
        components: VarianceComponents::Sst { sigma2_sq },
    }
}

pub fn asymptotic_variance(sample: &IncomeSample, z: PovertyLine, kind: IndexKind) -> Result<AsymptoticVariance> {
    match kind {
        IndexKind::Sen => sen_asymptotic_variance(sample, z),
        IndexKind::Sst => Ok(sst_asymptotic_variance(sample, z)),
    }
}

/// `estimate +- z_{alpha/2} sqrt(sigma^2 / n)`, truncated to `[0, 1]`.
pub fn normal_ci(estimate: &IndexEstimate, variance: &AsymptoticVariance, alpha: f64) -> Result<ConfidenceInterval> {
    check_alpha(alpha)?;
    let half = normal_quantile(1.0 - alpha / 2.0) * (variance.sigma_sq / estimate.n as f64).sqrt();
    let v = estimate.value;
    Ok(ConfidenceInterval {
        index_kind: estimate.index_kind,
        method: CiMethod::Normal,
        estimate: v,
        lower: (v - half).clamp(0.0, 1.0),
        upper: (v + half).clamp(0.0, 1.0),
        level: 1.0 - alpha,
        diagnostics: CiDiagnostics::default(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const Z: f64 = 1.41;

    fn s(v: &[f64]) -> IncomeSample {
        IncomeSample::new(v.to_vec()).unwrap()
    }

    fn z() -> PovertyLine {
        PovertyLine::new(Z).unwrap()
    }

    const A: [f64; 3] = [0.5, 1.0, 2.0];
    const B: [f64; 4] = [0.2, 0.4, 0.6, 2.0];

    #[test]
    fn sen_plugin_examples() {
        assert!((sen_plugin(&s(&A), z()).value - 1.82 / 8.46).abs() < 1e-12);
        assert!((sen_plugin(&s(&A), z()).value - 0.215130).abs() < 1e-6);
        assert!((sen_plugin(&s(&B), z()).value - 6.86 / 16.92).abs() < 1e-12);
        let e = sen_plugin(&s(&[2.0, 3.0]), z());
        assert_eq!(e.value, 0.0);
        assert!(e.no_poor);
        assert_eq!(sen_plugin(&s(&[0.3, 3.0]), z()).value, 0.0);
    }

    #[test]
    fn sen_davidson_examples() {
        assert!((sen_davidson(&s(&A), z()).value - 314.0 / 846.0).abs() < 1e-12);
        let e = sen_davidson(&s(&[2.0, 3.0]), z());
        assert!(e.no_poor && e.value == 0.0);
        assert_eq!(sen_davidson(&s(&[Z, 3.0]), z()).value, 0.0);
    }

    #[test]
    fn sen_kernel_examples() {
        let c = sen_ustat_kernel(&s(&A), z());
        assert!((c.u1 - 0.151667).abs() < 1e-6);
        assert!((c.u2 - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(c.pair_count, 3);
        let c = sen_ustat_kernel(&s(&[2.0, 3.0, 4.0]), z());
        assert_eq!((c.u1, c.u2), (0.0, 0.0));
        let c = sen_ustat_kernel(&s(&B), z());
        assert!((c.u1 - 0.285833).abs() < 1e-6);
        assert!((c.u2 - 0.75).abs() < 1e-15);
    }

    #[test]
    fn sen_ustat_examples() {
        assert!((sen_ustat(&s(&A), z()).value - 1.82 / 5.64).abs() < 1e-12);
        assert!((sen_ustat(&s(&A), z()).value - 0.322695).abs() < 1e-6);
        assert!((sen_ustat(&s(&B), z()).value - 6.86 / 12.69).abs() < 1e-12);
        let e = sen_ustat(&s(&[2.0, 3.0]), z());
        assert!(e.no_poor && e.value == 0.0);
    }

    #[test]
    fn sen_ustat_with_ties_uses_kernel() {
        let x = s(&[0.3, 0.3, 0.9, 0.9, 0.9, 1.2, 4.0]);
        let k = sen_ustat_kernel(&x, z());
        let expected = 2.0 / Z * k.u1 / k.u2;
        assert!((sen_ustat(&x, z()).value - expected).abs() < 1e-14);
        let c = sen_ustat_components(&x, z());
        assert!((c.u1 - k.u1).abs() < 1e-15);
    }

    #[test]
    fn sst_examples() {
        assert!((sst_plugin(&s(&A), z()).value - 4.46 / 12.69).abs() < 1e-12);
        assert!((sst_davidson(&s(&A), z()).value - 5.78 / 12.69).abs() < 1e-12);
        assert!((sst_davidson(&s(&B), z()).value - 0.707004).abs() < 1e-6);
        assert!((sst_ustat(&s(&A), z()).value - 4.46 / 8.46).abs() < 1e-12);
        assert!((sst_ustat_kernel(&s(&A), z()) - 1.58156 / 3.0).abs() < 1e-5);
        assert!((sst_ustat(&s(&B), z()).value - 12.92 / 16.92).abs() < 1e-12);
        let zeros = s(&[0.0; 4]);
        assert!((sst_plugin(&zeros, z()).value - 0.75).abs() < 1e-15);
        assert!((sst_ustat(&zeros, z()).value - 1.0).abs() < 1e-15);
        for f in [sst_plugin, sst_davidson, sst_ustat] {
            assert_eq!(f(&s(&[2.0, 3.0]), z()).value, 0.0);
        }
    }

    #[test]
    fn sen_variance_examples() {
        let v = sen_asymptotic_variance(&s(&[0.7, 0.7, 0.7]), z()).unwrap();
        assert_eq!(v.sigma_sq, 0.0);
        match v.components {
            VarianceComponents::Sen { sigma1_sq, sigma2_sq, sigma12 } => {
                assert!(sigma1_sq.abs() < 1e-15);
                assert_eq!(sigma2_sq, 0.0);
                assert!(sigma12.abs() < 1e-15);
            }
            _ => unreachable!(),
        }
        // frozen from brute-force pair averages of psi1 and psi2
        let v = sen_asymptotic_variance(&s(&A), z()).unwrap();
        match v.components {
            VarianceComponents::Sen { sigma1_sq, sigma2_sq, sigma12 } => {
                assert!((sigma1_sq - 0.005111728395).abs() < 1e-11);
                assert!((sigma2_sq - 1.0 / 18.0).abs() < 1e-15);
                assert!((sigma12 - 0.016851851852).abs() < 1e-11);
            }
            _ => unreachable!(),
        }
        assert!((v.sigma_sq - 0.005785115884).abs() < 1e-11);
        let v = sen_asymptotic_variance(&s(&B), z()).unwrap();
        assert!((v.sigma_sq - 0.025842859665).abs() < 1e-11);
        let tied = s(&[0.5, 0.5, 1.0, 1.41, 2.0, 3.0]);
        assert!((sen_asymptotic_variance(&tied, z()).unwrap().sigma_sq - 0.021857133276).abs() < 1e-11);
        assert!(sen_asymptotic_variance(&s(&[2.0, 3.0]), z()).is_err());
    }

    #[test]
    fn sst_variance_examples() {
        assert_eq!(sst_asymptotic_variance(&s(&[0.7; 5]), z()).sigma_sq, 0.0);
        assert!(sst_asymptotic_variance(&s(&[2.0, 3.0, 7.0]), z()).sigma_sq.abs() < 1e-15);
        assert!((sst_asymptotic_variance(&s(&A), z()).sigma_sq - 0.078397328301).abs() < 1e-11);
        assert!((sst_asymptotic_variance(&s(&B), z()).sigma_sq - 0.054357018007).abs() < 1e-11);
    }

    fn est(value: f64, n: usize) -> IndexEstimate {
        IndexEstimate {
            index_kind: IndexKind::Sen,
            method: EstimatorMethod::Davidson,
            value,
            n,
            q: n,
            z: Z,
            no_poor: false,
        }
    }

    fn var(sigma_sq: f64) -> AsymptoticVariance {
        AsymptoticVariance { sigma_sq, components: VarianceComponents::Sst { sigma2_sq: sigma_sq / 4.0 } }
    }

    #[test]
    fn normal_ci_examples() {
        let ci = normal_ci(&est(0.3, 10), &var(0.0), 0.05).unwrap();
        assert_eq!((ci.lower, ci.upper), (0.3, 0.3));
        let ci = normal_ci(&est(0.5, 4), &var(4.0), 0.05).unwrap();
        assert_eq!((ci.lower, ci.upper), (0.0, 1.0));
        let ci = normal_ci(&est(0.2, 100), &var(0.25), 0.05).unwrap();
        assert!((ci.lower - 0.102).abs() < 1e-3 && (ci.upper - 0.298).abs() < 1e-3);
        assert!((ci.lower - (0.2 - 1.959964 * 0.05)).abs() < 1e-7);
        assert!(normal_ci(&est(0.2, 100), &var(0.25), 1.0).is_err());
    }

    fn distinct_sample() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::btree_set(0u32..100_000, 3..50)
            .prop_map(|set| set.into_iter().map(|k| k as f64 / 25_000.0).collect())
    }

    proptest! {
        #[test]
        fn closed_forms_match_kernels(v in distinct_sample()) {
            let x = s(&v);
            let k = sen_ustat_kernel(&x, z());
            if k.u2 > 0.0 {
                prop_assert!((sen_ustat(&x, z()).value - 2.0 / Z * k.u1 / k.u2).abs() <= 1e-12);
            }
            prop_assert!((sst_ustat(&x, z()).value - sst_ustat_kernel(&x, z())).abs() <= 1e-12);
        }

        #[test]
        fn ordering_and_range(v in prop::collection::vec(0.0f64..4.0, 2..50)) {
            let x = s(&v);
            let eps = 1e-12;
            let all: Vec<f64> = IndexKind::ALL.iter()
                .flat_map(|k| EstimatorMethod::ALL.iter().map(move |m| (*k, *m)))
                .map(|(k, m)| estimate(&x, z(), k, m).value)
                .collect();
            for value in all {
                prop_assert!((-eps..=1.0 + eps).contains(&value));
            }
            let (sp, sd) = (sst_plugin(&x, z()).value, sst_davidson(&x, z()).value);
            let (np, nd) = (sen_plugin(&x, z()).value, sen_davidson(&x, z()).value);
            prop_assert!(sd >= sp);
            prop_assert!(nd >= np);
            let zero_gaps = x.poor(z()).iter().all(|&p| p == Z);
            prop_assert_eq!(sd == sp, zero_gaps);
        }

        #[test]
        fn non_poor_incomes_do_not_matter(v in prop::collection::vec(0.0f64..4.0, 2..40), bump in 0.0f64..10.0) {
            let x = s(&v);
            let moved = s(&v.iter().map(|&a| if a > Z { a + bump } else { a }).collect::<Vec<_>>());
            for k in IndexKind::ALL {
                for m in EstimatorMethod::ALL {
                    prop_assert_eq!(estimate(&x, z(), k, m).value, estimate(&moved, z(), k, m).value);
                }
            }
        }

        #[test]
        fn sst_gap_terms_grow_with_line(v in distinct_sample(), dz in 0.0f64..0.5) {
            let x = s(&v);
            let z2 = Z + dz;
            for p in x.poor(z()) {
                prop_assert!((z2 - p) / z2 >= (Z - p) / Z - 1e-15);
            }
        }

        #[test]
        fn variances_nonnegative(v in prop::collection::vec(0.0f64..4.0, 2..40)) {
            let x = s(&v);
            if let Ok(a) = sen_asymptotic_variance(&x, z()) {
                prop_assert!(a.sigma_sq >= 0.0 && a.sigma_sq.is_finite());
            }
            let b = sst_asymptotic_variance(&x, z());
            prop_assert!(b.sigma_sq >= 0.0);
        }
    }
}
