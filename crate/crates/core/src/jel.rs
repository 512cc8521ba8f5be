//! Jackknife empirical likelihood for the U-statistic estimators.
//!
//! For a degree-2 kernel with pair total `T` and per-observation row sums
//! `R_k`, the leave-one-out statistic is `(T - R_k) / C(n-1, 2)`, so all `n`
//! pseudo-values `n U_n - (n - 1) U_{n-1,k}` come out of one O(n^2) pass.
//!
//! Sen works with the estimating kernel `2 psi1 - z s psi2` evaluated at the
//! hypothesised `s`; since it is linear in `s`, pseudo-values for `psi1` and
//! `psi2` are stored once and combined per candidate. SST uses the `psi3`
//! pseudo-values centred at the candidate value.

use serde::{Deserialize, Serialize};

use crate::el::{log_ratio_of, EstimatingValues};
use crate::error::{PovError, Result};
use crate::estimators::{psi1, psi2, psi3, IndexKind};
use crate::interval::{check_alpha, invert_ratio, CiMethod, ConfidenceInterval};
use crate::model::{IncomeSample, PovertyLine};
use crate::normal::chi2_1_critical;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PseudoValues {
    pub values: Vec<f64>,
    pub n: usize,
    pub mean: f64,
}

impl PseudoValues {
    fn new(values: Vec<f64>) -> Self {
        let n = values.len();
        let mean = values.iter().sum::<f64>() / n as f64;
        Self { values, n, mean }
    }
}

/// Pair total and row sums of a symmetric kernel over the sample.
fn kernel_rows(x: &[f64], kernel: impl Fn(f64, f64) -> f64) -> (f64, Vec<f64>) {
    let mut rows = vec![0.0; x.len()];
    let mut total = 0.0;
    for i in 0..x.len() {
        for j in 0..i {
            let k = kernel(x[i], x[j]);
            rows[i] += k;
            rows[j] += k;
            total += k;
        }
    }
    (total, rows)
}

/// `(U_n, [n U_n - (n-1) U_{n-1,k}])` from a pair total and its row sums.
fn pseudo_from_rows(total: f64, rows: &[f64]) -> (f64, Vec<f64>) {
    let n = rows.len() as f64;
    let full = total / (n * (n - 1.0) / 2.0);
    let reduced_pairs = (n - 1.0) * (n - 2.0) / 2.0;
    let values = rows
        .iter()
        .map(|r| n * full - (n - 1.0) * (total - r) / reduced_pairs)
        .collect();
    (full, values)
}

fn require_three(sample: &IncomeSample) -> Result<()> {
    if sample.len() < 3 {
        return Err(PovError::TooFewObservations { found: sample.len() });
    }
    Ok(())
}

/// Jackknife of `U1` and `U2`, ready to be combined at any candidate `s`.
#[derive(Debug, Clone)]
pub struct SenJackknife {
    z: f64,
    u1: f64,
    u2: f64,
    v1: Vec<f64>,
    v2: Vec<f64>,
}

impl SenJackknife {
    pub fn new(sample: &IncomeSample, z: PovertyLine) -> Result<Self> {
        require_three(sample)?;
        let zv = z.get();
        let x = sample.values();
        let (t1, r1) = kernel_rows(x, |a, b| psi1(a, b, zv));
        let (t2, r2) = kernel_rows(x, |a, b| psi2(a, b, zv));
        let (u1, v1) = pseudo_from_rows(t1, &r1);
        let (u2, v2) = pseudo_from_rows(t2, &r2);
        Ok(Self { z: zv, u1, u2, v1, v2 })
    }

    pub fn u1(&self) -> f64 {
        self.u1
    }

    pub fn u2(&self) -> f64 {
        self.u2
    }

    /// `s` solving `2 U1 - z s U2 = 0`, i.e. the U-statistic Sen estimate.
    pub fn root(&self) -> f64 {
        if self.u2 == 0.0 {
            0.0
        } else {
            2.0 * self.u1 / (self.z * self.u2)
        }
    }

    /// Pseudo-values of `2 U1 - z s U2`.
    pub fn at(&self, s: f64) -> PseudoValues {
        let zs = self.z * s;
        PseudoValues::new(self.v1.iter().zip(&self.v2).map(|(a, b)| 2.0 * a - zs * b).collect())
    }

    pub fn log_ratio(&self, s: f64) -> Result<(f64, usize)> {
        log_ratio_of(&EstimatingValues::new(self.at(s).values)?)
    }
}

#[derive(Debug, Clone)]
pub struct SstJackknife {
    pseudo: PseudoValues,
}

impl SstJackknife {
    pub fn new(sample: &IncomeSample, z: PovertyLine) -> Result<Self> {
        require_three(sample)?;
        let zv = z.get();
        let (t, r) = kernel_rows(sample.values(), |a, b| psi3(a, b, zv));
        let (_, values) = pseudo_from_rows(t, &r);
        Ok(Self { pseudo: PseudoValues::new(values) })
    }

    pub fn pseudo_values(&self) -> &PseudoValues {
        &self.pseudo
    }

    pub fn root(&self) -> f64 {
        self.pseudo.mean
    }

    pub fn centered(&self, candidate: f64) -> Vec<f64> {
        self.pseudo.values.iter().map(|q| q - candidate).collect()
    }

    pub fn log_ratio(&self, candidate: f64) -> Result<(f64, usize)> {
        log_ratio_of(&EstimatingValues::new(self.centered(candidate))?)
    }
}

pub fn sen_jel_pseudovalues(sample: &IncomeSample, z: PovertyLine, s: f64) -> Result<PseudoValues> {
    Ok(SenJackknife::new(sample, z)?.at(s))
}

pub fn sst_jel_pseudovalues(sample: &IncomeSample, z: PovertyLine) -> Result<PseudoValues> {
    Ok(SstJackknife::new(sample, z)?.pseudo)
}

enum Jackknife {
    Sen(SenJackknife),
    Sst(SstJackknife),
}

impl Jackknife {
    fn new(sample: &IncomeSample, z: PovertyLine, kind: IndexKind) -> Result<Self> {
        Ok(match kind {
            IndexKind::Sen => Jackknife::Sen(SenJackknife::new(sample, z)?),
            IndexKind::Sst => Jackknife::Sst(SstJackknife::new(sample, z)?),
        })
    }

    fn root(&self) -> f64 {
        match self {
            Jackknife::Sen(j) => j.root(),
            Jackknife::Sst(j) => j.root(),
        }
    }

    fn values_at(&self, candidate: f64) -> Vec<f64> {
        match self {
            Jackknife::Sen(j) => j.at(candidate).values,
            Jackknife::Sst(j) => j.centered(candidate),
        }
    }

    fn log_ratio(&self, candidate: f64) -> Result<(f64, usize)> {
        match self {
            Jackknife::Sen(j) => j.log_ratio(candidate),
            Jackknife::Sst(j) => j.log_ratio(candidate),
        }
    }
}

/// Jackknife empirical log likelihood ratio at `candidate`; `+inf` when the
/// candidate lies outside the pseudo-value hull.
pub fn jel_log_ratio(sample: &IncomeSample, z: PovertyLine, kind: IndexKind, candidate: f64) -> Result<f64> {
    Ok(Jackknife::new(sample, z, kind)?.log_ratio(candidate)?.0)
}

pub fn jel_confidence_interval(
    sample: &IncomeSample,
    z: PovertyLine,
    kind: IndexKind,
    alpha: f64,
) -> Result<ConfidenceInterval> {
    check_alpha(alpha)?;
    require_three(sample)?;
    let q = sample.count_le(z.get());
    if q < 2 {
        return Err(PovError::NoPoorObservations { found: q, required: 2 });
    }
    let jk = Jackknife::new(sample, z, kind)?;
    let center = jk.root();
    let scale = match kind {
        IndexKind::Sen => z.get().max(1.0),
        IndexKind::Sst => 1.0,
    };
    if jk.values_at(center).iter().all(|v| v.abs() <= 1e-12 * scale) {
        return Err(PovError::DegenerateInterval);
    }
    let (lower, upper, diagnostics) = invert_ratio(|s| jk.log_ratio(s), center, chi2_1_critical(alpha))?;
    Ok(ConfidenceInterval {
        index_kind: kind,
        method: CiMethod::Jel,
        estimate: center.clamp(0.0, 1.0),
        lower,
        upper,
        level: 1.0 - alpha,
        diagnostics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::{sen_ustat, sen_ustat_kernel, sst_ustat};
    use proptest::prelude::*;

    const Z: f64 = 1.41;

    fn s(v: &[f64]) -> IncomeSample {
        IncomeSample::new(v.to_vec()).unwrap()
    }

    fn z() -> PovertyLine {
        PovertyLine::new(Z).unwrap()
    }

    fn pair_mean(x: &[f64], k: impl Fn(f64, f64) -> f64) -> f64 {
        let mut t = 0.0;
        let mut m = 0;
        for i in 0..x.len() {
            for j in (i + 1)..x.len() {
                t += k(x[i], x[j]);
                m += 1;
            }
        }
        t / m as f64
    }

    /// Pseudo-values recomputed by deleting each observation in turn.
    fn brute_pseudo(x: &[f64], k: impl Fn(f64, f64) -> f64 + Copy) -> Vec<f64> {
        let n = x.len() as f64;
        let full = pair_mean(x, k);
        (0..x.len())
            .map(|del| {
                let rest: Vec<f64> = x.iter().enumerate().filter(|(i, _)| *i != del).map(|(_, v)| *v).collect();
                n * full - (n - 1.0) * pair_mean(&rest, k)
            })
            .collect()
    }

    #[test]
    fn sen_pseudo_examples() {
        let x = s(&[0.5, 1.0, 2.0]);
        let pv = sen_jel_pseudovalues(&x, z(), 0.0).unwrap();
        let expected = [0.91, 0.91, -0.91];
        for (a, b) in pv.values.iter().zip(expected) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!((pv.mean - 0.303333).abs() < 1e-6);
        let k = sen_ustat_kernel(&x, z());
        assert!((pv.mean - 2.0 * k.u1).abs() < 1e-12);

        let at_est = sen_jel_pseudovalues(&x, z(), sen_ustat(&x, z()).value).unwrap();
        assert!(at_est.mean.abs() < 1e-12);

        let rich = s(&[2.0, 3.0, 4.5, 7.0]);
        assert!(sen_jel_pseudovalues(&rich, z(), 0.0).unwrap().values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn sst_pseudo_examples() {
        let x = s(&[0.5, 1.0, 2.0]);
        let pv = sst_jel_pseudovalues(&x, z()).unwrap();
        assert!((pv.mean - 0.527187).abs() < 1e-6);
        assert!((pv.mean - sst_ustat(&x, z()).value).abs() < 1e-12);
        let expected = [1.0, 0.29078, 0.29078];
        for (a, b) in pv.values.iter().zip(expected) {
            assert!((a - b).abs() < 1e-5);
        }
        let zeros = sst_jel_pseudovalues(&s(&[0.0; 5]), z()).unwrap();
        assert!(zeros.values.iter().all(|v| (v - 1.0).abs() < 1e-12));
        assert!(sst_jel_pseudovalues(&s(&[0.3, 0.4]), z()).is_err());
    }

    #[test]
    fn ratio_zero_at_ustat_and_infinite_outside() {
        let x = s(&[0.1, 0.35, 0.5, 0.8, 1.1, 1.3, 2.0, 3.0]);
        let se = sen_ustat(&x, z()).value;
        assert!(jel_log_ratio(&x, z(), IndexKind::Sen, se).unwrap() < 1e-10);
        let sh = sst_ustat(&x, z()).value;
        assert!(jel_log_ratio(&x, z(), IndexKind::Sst, sh).unwrap() < 1e-10);

        let tight = s(&[1.40, 1.401, 1.402, 1.403, 1.404]);
        assert_eq!(jel_log_ratio(&tight, z(), IndexKind::Sen, 1.0).unwrap(), f64::INFINITY);
    }

    #[test]
    fn interval_contains_estimate() {
        let x = s(&[0.05, 0.12, 0.2, 0.33, 0.41, 0.52, 0.6, 0.77, 0.9, 1.02, 1.2, 1.33, 1.6, 2.2, 3.1]);
        for kind in IndexKind::ALL {
            let ci = jel_confidence_interval(&x, z(), kind, 0.05).unwrap();
            let est = match kind {
                IndexKind::Sen => sen_ustat(&x, z()).value,
                IndexKind::Sst => sst_ustat(&x, z()).value,
            };
            assert!((ci.estimate - est).abs() < 1e-12);
            assert!(ci.lower <= est && est <= ci.upper);
            for end in [ci.lower, ci.upper] {
                if end > 0.0 && end < 1.0 {
                    let r = jel_log_ratio(&x, z(), kind, end).unwrap();
                    assert!((r - 3.841459).abs() < 1e-4 || ci.diagnostics.infeasible_endpoints);
                }
            }
        }
    }

    #[test]
    fn degenerate_inputs() {
        let x = s(&[0.7, 0.7, 0.7, 2.0]);
        assert_eq!(
            jel_confidence_interval(&x, z(), IndexKind::Sen, 0.05),
            Err(PovError::DegenerateInterval)
        );
        let x = s(&[0.7, 0.7, 0.7, 0.7]);
        assert_eq!(
            jel_confidence_interval(&x, z(), IndexKind::Sst, 0.05),
            Err(PovError::DegenerateInterval)
        );
        let x = s(&[2.0, 3.0, 4.0]);
        assert!(matches!(
            jel_confidence_interval(&x, z(), IndexKind::Sen, 0.05),
            Err(PovError::NoPoorObservations { found: 0, .. })
        ));
    }

    fn sample_strategy(max: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(0.0f64..3.0, 3..max)
    }

    proptest! {
        #[test]
        fn mean_recovery(v in sample_strategy(61), cand in 0.0f64..1.0) {
            let x = s(&v);
            let sen = SenJackknife::new(&x, z()).unwrap();
            let pv = sen.at(cand);
            prop_assert!((pv.mean - (2.0 * sen.u1() - Z * cand * sen.u2())).abs() <= 1e-12);
            let sst = sst_jel_pseudovalues(&x, z()).unwrap();
            let kernel = pair_mean(x.values(), |a, b| psi3(a, b, Z));
            prop_assert!((sst.mean - kernel).abs() <= 1e-12);
        }

        #[test]
        fn incremental_matches_deletion(v in sample_strategy(26), cand in 0.0f64..1.0) {
            let x = s(&v);
            let brute1 = brute_pseudo(x.values(), |a, b| psi1(a, b, Z));
            let brute2 = brute_pseudo(x.values(), |a, b| psi2(a, b, Z));
            let fast = sen_jel_pseudovalues(&x, z(), cand).unwrap();
            for k in 0..x.len() {
                let b = 2.0 * brute1[k] - Z * cand * brute2[k];
                prop_assert!((fast.values[k] - b).abs() <= 1e-12);
            }
            let brute3 = brute_pseudo(x.values(), |a, b| psi3(a, b, Z));
            let fast3 = sst_jel_pseudovalues(&x, z()).unwrap();
            for (f, b) in fast3.values.iter().zip(&brute3) {
                prop_assert!((f - b).abs() <= 1e-12);
            }
        }
    }
}
