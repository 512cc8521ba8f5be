//! Monte Carlo harness: true index values by quadrature, reproducible
//! replication streams and the bias/MSE and coverage/length grids.

pub mod distribution;
pub mod quadrature;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use distribution::DistributionSpec;

use crate::error::{PovError, Result};
use crate::estimators::{estimate, EstimatorMethod, IndexKind};
use crate::interval::{check_alpha, confidence_interval, CiMethod};
use crate::model::PovertyLine;

pub const THREADS_ENV: &str = "POVINDEX_THREADS";
const QUAD_TOL: f64 = 1e-10;

/// Population value of the index under `dist` at poverty line `z`.
///
/// ```text
/// Sen: (2 / (z F(z))) int_0^z (z - x) (F(z) - F(x)) dF(x)
/// SST: (2 / z)        int_0^z (z - x) (1 - F(x))    dF(x)
/// ```
pub fn true_index(dist: &DistributionSpec, z: f64, kind: IndexKind) -> Result<f64> {
    let z = PovertyLine::new(z)?.get();
    let lo = dist.support_min();
    let fz = dist.cdf(z);
    match kind {
        IndexKind::Sen => {
            if fz <= 1e-12 {
                return Err(PovError::ZeroPoorMass);
            }
            let integral = quadrature::integrate(
                |x| (z - x) * (fz - dist.cdf(x)) * dist.pdf(x),
                lo,
                z,
                QUAD_TOL * z * fz / 2.0,
            );
            Ok(2.0 / (z * fz) * integral)
        }
        IndexKind::Sst => {
            if lo >= z {
                return Ok(0.0);
            }
            let integral =
                quadrature::integrate(|x| (z - x) * (1.0 - dist.cdf(x)) * dist.pdf(x), lo, z, QUAD_TOL * z / 2.0);
            Ok(2.0 / z * integral)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EstimatorSpec {
    pub index: IndexKind,
    pub method: EstimatorMethod,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntervalSpec {
    pub index: IndexKind,
    pub method: CiMethod,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloConfig {
    pub reps: usize,
    pub seed: u64,
    pub n_grid: Vec<usize>,
    pub z: f64,
    pub alpha: f64,
    #[serde(default)]
    pub estimators: Vec<EstimatorSpec>,
    #[serde(default)]
    pub intervals: Vec<IntervalSpec>,
    /// Worker threads; `None` uses the global rayon pool.
    #[serde(default)]
    pub threads: Option<usize>,
}

impl MonteCarloConfig {
    pub fn validate(&self) -> Result<()> {
        if self.reps == 0 {
            return Err(PovError::Config("reps must be >= 1".into()));
        }
        if let Some(n) = self.n_grid.iter().find(|&&n| n < 3) {
            return Err(PovError::Config(format!("sample sizes must be >= 3, got {n}")));
        }
        if self.n_grid.is_empty() {
            return Err(PovError::Config("n_grid is empty".into()));
        }
        if self.threads == Some(0) {
            return Err(PovError::Config("threads must be >= 1".into()));
        }
        PovertyLine::new(self.z)?;
        check_alpha(self.alpha)
    }
}

/// Thread cap from `POVINDEX_THREADS`, when set to a positive integer.
pub fn threads_from_env() -> Option<usize> {
    std::env::var(THREADS_ENV).ok()?.trim().parse().ok().filter(|&t| t > 0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CellKind {
    Estimator,
    Interval,
}

/// Outcome of one `(distribution, n, index, method)` grid cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationCellReport {
    pub distribution: DistributionSpec,
    pub n: usize,
    pub index: IndexKind,
    pub kind: CellKind,
    /// Estimator tag (`ustat`, `plugin`, `davidson`) or interval tag (`el`, `jel`, `normal`).
    pub method: String,
    pub true_value: f64,
    pub mean_estimate: Option<f64>,
    pub bias: Option<f64>,
    pub mse: Option<f64>,
    pub coverage: Option<f64>,
    pub avg_length: Option<f64>,
    /// Intervals containing the true value.
    pub covered: usize,
    pub reps_used: usize,
    /// Replications where the interval was undefined (excluded above).
    pub failures: usize,
    /// Replications with no observation at or below the line (estimate 0).
    pub no_poor: usize,
    /// Monte Carlo standard error of the mean estimate or of the coverage.
    pub mc_se: f64,
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

/// Stream id of a `(distribution, n)` cell.
pub fn cell_stream(dist: &DistributionSpec, n: usize) -> u64 {
    fnv1a(format!("{}|n={n}", dist.label()).as_bytes())
}

/// Generator for replication `rep` of a cell.
///
/// ChaCha8 keyed by `seed`, on stream `stream`, positioned at word
/// `rep << 32`: replications never overlap as long as each draws fewer than
/// 2^32 words.
pub fn replication_rng(seed: u64, stream: u64, rep: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng.set_word_pos(u128::from(rep) << 32);
    rng
}

/// Neumaier-compensated sum.
fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let (mut sum, mut c) = (0.0f64, 0.0f64);
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            c += (sum - t) + v;
        } else {
            c += (v - t) + sum;
        }
        sum = t;
    }
    sum + c
}

struct RepOutcome {
    estimates: Vec<(f64, bool)>,
    intervals: Vec<Option<(f64, f64)>>,
}

fn run_cell(
    config: &MonteCarloConfig,
    dist: &DistributionSpec,
    n: usize,
) -> Result<Vec<SimulationCellReport>> {
    let z = PovertyLine::new(config.z)?;
    let stream = cell_stream(dist, n);
    let outcomes: Vec<RepOutcome> = (0..config.reps)
        .into_par_iter()
        .map(|r| -> Result<RepOutcome> {
            let mut rng = replication_rng(config.seed, stream, r as u64);
            let sample = dist.sample(n, &mut rng)?;
            let estimates = config
                .estimators
                .iter()
                .map(|e| {
                    let est = estimate(&sample, z, e.index, e.method);
                    (est.value, est.no_poor)
                })
                .collect();
            let mut intervals = Vec::with_capacity(config.intervals.len());
            for spec in &config.intervals {
                match confidence_interval(&sample, z, spec.index, spec.method, config.alpha) {
                    Ok(ci) => intervals.push(Some((ci.lower, ci.upper))),
                    Err(e @ PovError::NonConvergence { .. }) => return Err(e),
                    Err(_) => intervals.push(None),
                }
            }
            Ok(RepOutcome { estimates, intervals })
        })
        .collect::<Result<_>>()?;

    let reps = config.reps as f64;
    let mut reports = Vec::new();
    for (i, spec) in config.estimators.iter().enumerate() {
        let truth = true_index(dist, config.z, spec.index)?;
        let values: Vec<f64> = outcomes.iter().map(|o| o.estimates[i].0).collect();
        let mean = compensated_sum(values.iter().copied()) / reps;
        let mse = compensated_sum(values.iter().map(|v| (v - truth) * (v - truth))) / reps;
        let sd = if config.reps > 1 {
            (compensated_sum(values.iter().map(|v| (v - mean) * (v - mean))) / (reps - 1.0)).sqrt()
        } else {
            0.0
        };
        reports.push(SimulationCellReport {
            distribution: *dist,
            n,
            index: spec.index,
            kind: CellKind::Estimator,
            method: spec.method.as_str().to_string(),
            true_value: truth,
            mean_estimate: Some(mean),
            bias: Some(mean - truth),
            mse: Some(mse),
            coverage: None,
            avg_length: None,
            covered: 0,
            reps_used: config.reps,
            failures: 0,
            no_poor: outcomes.iter().filter(|o| o.estimates[i].1).count(),
            mc_se: sd / reps.sqrt(),
        });
    }
    for (i, spec) in config.intervals.iter().enumerate() {
        let truth = true_index(dist, config.z, spec.index)?;
        let ok: Vec<(f64, f64)> = outcomes.iter().filter_map(|o| o.intervals[i]).collect();
        let used = ok.len();
        let covered = ok.iter().filter(|(lo, hi)| *lo <= truth && truth <= *hi).count();
        let (coverage, avg_length, mc_se) = if used > 0 {
            let c = covered as f64 / used as f64;
            let len = compensated_sum(ok.iter().map(|(lo, hi)| hi - lo)) / used as f64;
            (Some(c), Some(len), (c * (1.0 - c) / used as f64).sqrt())
        } else {
            (None, None, 0.0)
        };
        reports.push(SimulationCellReport {
            distribution: *dist,
            n,
            index: spec.index,
            kind: CellKind::Interval,
            method: spec.method.as_str().to_string(),
            true_value: truth,
            mean_estimate: None,
            bias: None,
            mse: None,
            coverage,
            avg_length,
            covered,
            reps_used: used,
            failures: config.reps - used,
            no_poor: 0,
            mc_se,
        });
    }
    Ok(reports)
}

fn run_grid(config: &MonteCarloConfig, dists: &[DistributionSpec]) -> Result<Vec<SimulationCellReport>> {
    config.validate()?;
    for d in dists {
        d.validated()?;
    }
    let body = || -> Result<Vec<SimulationCellReport>> {
        let mut out = Vec::new();
        for d in dists {
            for &n in &config.n_grid {
                out.extend(run_cell(config, d, n)?);
            }
        }
        Ok(out)
    };
    match config.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| PovError::Config(e.to_string()))?
            .install(body),
        None => body(),
    }
}

/// Bias and MSE of every configured estimator over the grid.
pub fn run_estimator_grid(config: &MonteCarloConfig, dists: &[DistributionSpec]) -> Result<Vec<SimulationCellReport>> {
    let cfg = MonteCarloConfig { intervals: Vec::new(), ..config.clone() };
    run_grid(&cfg, dists)
}

/// Coverage and average length of every configured interval over the grid.
pub fn run_ci_grid(config: &MonteCarloConfig, dists: &[DistributionSpec]) -> Result<Vec<SimulationCellReport>> {
    let cfg = MonteCarloConfig { estimators: Vec::new(), ..config.clone() };
    run_grid(&cfg, dists)
}

/// Both grids in one pass; estimator and interval cells of the same
/// `(distribution, n)` share replications.
pub fn run_full_grid(config: &MonteCarloConfig, dists: &[DistributionSpec]) -> Result<Vec<SimulationCellReport>> {
    run_grid(config, dists)
}
