//! Empirical likelihood for the Sen and SST indices.
//!
//! Both estimating functions are affine in the hypothesised index value `s`:
//!
//! ```text
//! Sen:  K_i(s) = ( 2 (z - X_i) (F_n(z) - F_n(X_i)) - z s ) I(X_i <= z)
//! SST:  M_i(s) =   2 (z - X_i) (1 - F_n(X_i)) I(X_i <= z) - z s
//! ```
//!
//! The profile log ratio `-2 log L(s) = 2 sum log(1 + lambda g_i)` is finite
//! only while zero lies strictly inside the convex hull of the `g_i`, and the
//! multiplier `lambda` is the unique root of the (strictly decreasing) dual
//! `(1/m) sum g_i / (1 + lambda g_i)` on `(-1/max g, -1/min g)`.

use serde::{Deserialize, Serialize};

use crate::error::{PovError, Result};
use crate::estimators::IndexKind;
use crate::interval::{check_alpha, invert_ratio, CiMethod, ConfidenceInterval};
use crate::model::{IncomeSample, PovertyLine};
use crate::normal::chi2_1_critical;

pub const MAX_ITERATIONS: usize = 200;
const POLE_MARGIN: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatingValues {
    values: Vec<f64>,
    feasible: bool,
}

impl EstimatingValues {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(PovError::InvalidSample(format!(
                "need at least 2 estimating values, got {}",
                values.len()
            )));
        }
        let (min, max) = min_max(&values);
        Ok(Self { feasible: min < 0.0 && max > 0.0, values })
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

    /// Zero lies strictly inside the convex hull of the values.
    pub fn is_feasible(&self) -> bool {
        self.feasible
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }
}

fn min_max(v: &[f64]) -> (f64, f64) {
    v.iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElSolution {
    pub lambda: f64,
    /// `2 sum log(1 + lambda g_i)`.
    pub log_ratio: f64,
    /// `p_i = 1 / (m (1 + lambda g_i))`.
    pub weights: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
}

fn dual(g: &[f64], lambda: f64) -> (f64, f64) {
    let (mut d, mut dd) = (0.0, 0.0);
    for &x in g {
        let r = x / (1.0 + lambda * x);
        d += r;
        dd -= r * r;
    }
    let m = g.len() as f64;
    (d / m, dd / m)
}

fn finish(g: &[f64], lambda: f64, iterations: usize) -> ElSolution {
    let m = g.len() as f64;
    let log_ratio = 2.0 * g.iter().map(|x| (lambda * x).ln_1p()).sum::<f64>();
    ElSolution {
        lambda,
        log_ratio: log_ratio.max(0.0),
        weights: g.iter().map(|x| 1.0 / (m * (1.0 + lambda * x))).collect(),
        converged: true,
        iterations,
    }
}

/// Solves the EL dual for the Lagrange multiplier.
///
/// Safeguarded Newton from `lambda = 0`: steps that would leave the current
/// sign bracket fall back to bisection. The bracket starts at the two poles
/// pulled inward by a relative margin of `1e-10`.
pub fn solve_lambda(values: &EstimatingValues) -> Result<ElSolution> {
    let g = values.values();
    if g.iter().all(|&x| x == 0.0) {
        // the mean constraint holds under uniform weights
        return Ok(finish(g, 0.0, 0));
    }
    if !values.is_feasible() {
        return Err(PovError::Infeasible);
    }
    let (gmin, gmax) = min_max(g);
    let mut lo = -(1.0 - POLE_MARGIN) / gmax;
    let mut hi = -(1.0 - POLE_MARGIN) / gmin;
    let scale = gmax.max(-gmin);
    let tol = 1e-10 * scale.min(1.0);

    let mut lambda = 0.0;
    for it in 1..=MAX_ITERATIONS {
        let (d, dd) = dual(g, lambda);
        // sum of weights is 1 - lambda d, so scale the residual by lambda too
        if d.abs() * (1.0 + lambda.abs()) <= tol {
            return Ok(finish(g, lambda, it));
        }
        if d > 0.0 {
            lo = lambda;
        } else {
            hi = lambda;
        }
        if hi - lo <= 4.0 * f64::EPSILON * lo.abs().max(hi.abs()) {
            return Ok(finish(g, lambda, it));
        }
        let mut next = lambda - d / dd;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        lambda = next;
    }
    Err(PovError::NonConvergence { iterations: MAX_ITERATIONS })
}

/// `2 sum log(1 + lambda g_i)`, or `+inf` when zero is outside the hull.
pub fn log_ratio_of(values: &EstimatingValues) -> Result<(f64, usize)> {
    match solve_lambda(values) {
        Ok(sol) => Ok((sol.log_ratio, sol.iterations)),
        Err(PovError::Infeasible) => Ok((f64::INFINITY, 0)),
        Err(e) => Err(e),
    }
}

/// Affine estimating function `g_i(s) = offset_i - z s weight_i`.
#[derive(Debug, Clone)]
pub struct ElEstimatingFunction {
    kind: IndexKind,
    z: f64,
    offsets: Vec<f64>,
    weights: Vec<f64>,
}

impl ElEstimatingFunction {
    /// Builds `K` (Sen) or `M` (SST) for `sample`; needs two or more poor.
    pub fn new(sample: &IncomeSample, z: PovertyLine, kind: IndexKind) -> Result<Self> {
        let zv = z.get();
        let n = sample.len() as f64;
        let q = sample.count_le(zv);
        if q < 2 {
            return Err(PovError::NoPoorObservations { found: q, required: 2 });
        }
        let fz = q as f64 / n;
        let x = sample.values();
        let mut offsets = Vec::with_capacity(x.len());
        let mut weights = Vec::with_capacity(x.len());
        for &xi in x {
            let poor = xi <= zv;
            let fx = sample.count_le(xi) as f64 / n;
            let (off, w) = match (kind, poor) {
                (IndexKind::Sen, true) => (2.0 * (zv - xi) * (fz - fx), 1.0),
                (IndexKind::Sen, false) => (0.0, 0.0),
                (IndexKind::Sst, true) => (2.0 * (zv - xi) * (1.0 - fx), 1.0),
                (IndexKind::Sst, false) => (0.0, 1.0),
            };
            offsets.push(off);
            weights.push(w);
        }
        Ok(Self { kind, z: zv, offsets, weights })
    }

    pub fn kind(&self) -> IndexKind {
        self.kind
    }

    pub fn values_at(&self, s: f64) -> EstimatingValues {
        let v = self
            .offsets
            .iter()
            .zip(&self.weights)
            .map(|(o, w)| o - self.z * s * w)
            .collect();
        EstimatingValues::new(v).expect("sample has at least two observations")
    }

    /// Root of the mean estimating equation. Equals the plug-in estimator
    /// (Sen or SST) whenever the incomes are distinct.
    pub fn root(&self) -> f64 {
        self.offsets.iter().sum::<f64>() / (self.z * self.weights.iter().sum::<f64>())
    }

    pub fn log_ratio(&self, s: f64) -> Result<(f64, usize)> {
        log_ratio_of(&self.values_at(s))
    }
}

pub fn sen_el_values(sample: &IncomeSample, z: PovertyLine, s: f64) -> Result<EstimatingValues> {
    Ok(ElEstimatingFunction::new(sample, z, IndexKind::Sen)?.values_at(s))
}

pub fn sst_el_values(sample: &IncomeSample, z: PovertyLine, s_h: f64) -> Result<EstimatingValues> {
    Ok(ElEstimatingFunction::new(sample, z, IndexKind::Sst)?.values_at(s_h))
}

/// `-2 log` empirical likelihood ratio at a candidate index value.
pub fn el_log_ratio(sample: &IncomeSample, z: PovertyLine, kind: IndexKind, candidate: f64) -> Result<f64> {
    Ok(ElEstimatingFunction::new(sample, z, kind)?.log_ratio(candidate)?.0)
}

/// `{s : -2 log L(s) <= chi2_1(1 - alpha)}` intersected with `[0, 1]`.
pub fn el_confidence_interval(
    sample: &IncomeSample,
    z: PovertyLine,
    kind: IndexKind,
    alpha: f64,
) -> Result<ConfidenceInterval> {
    check_alpha(alpha)?;
    let f = ElEstimatingFunction::new(sample, z, kind)?;
    let center = f.root();
    let at_center = f.values_at(center);
    let tol = 1e-12 * z.get().max(1.0);
    if at_center.values().iter().all(|v| v.abs() <= tol) {
        return Err(PovError::DegenerateInterval);
    }
    let (lower, upper, diagnostics) = invert_ratio(|s| f.log_ratio(s), center, chi2_1_critical(alpha))?;
    Ok(ConfidenceInterval {
        index_kind: kind,
        method: CiMethod::El,
        estimate: center.clamp(0.0, 1.0),
        lower,
        upper,
        level: 1.0 - alpha,
        diagnostics,
    })
}
