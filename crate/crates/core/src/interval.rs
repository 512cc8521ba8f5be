//! Confidence interval type and the shared likelihood-ratio inversion.

use serde::{Deserialize, Serialize};

use crate::error::{PovError, Result};
use crate::estimators::{asymptotic_variance, estimate, normal_ci, EstimatorMethod, IndexKind};
use crate::model::{IncomeSample, PovertyLine};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CiMethod {
    El,
    Jel,
    Normal,
}

impl CiMethod {
    pub const ALL: [CiMethod; 3] = [CiMethod::El, CiMethod::Jel, CiMethod::Normal];

    pub fn as_str(self) -> &'static str {
        match self {
            CiMethod::El => "el",
            CiMethod::Jel => "jel",
            CiMethod::Normal => "normal",
        }
    }
}

impl std::fmt::Display for CiMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for CiMethod {
    type Err = PovError;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "el" => Ok(CiMethod::El),
            "jel" => Ok(CiMethod::Jel),
            "normal" => Ok(CiMethod::Normal),
            other => Err(PovError::Config(format!("unknown interval method {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct CiDiagnostics {
    /// Likelihood-ratio evaluations performed during inversion.
    pub evaluations: usize,
    /// Total Lagrange-multiplier solver iterations across evaluations.
    pub solver_iterations: usize,
    pub bracket_expansions: usize,
    /// Bracket expansion ran into candidates where the ratio is infinite.
    pub infeasible_endpoints: bool,
    /// Endpoint clamped at 0 without the ratio reaching the critical value.
    pub lower_at_bound: bool,
    /// Endpoint clamped at 1 without the ratio reaching the critical value.
    pub upper_at_bound: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceInterval {
    pub index_kind: IndexKind,
    pub method: CiMethod,
    /// Point at which the interval is centred (ratio zero / normal centre).
    pub estimate: f64,
    pub lower: f64,
    pub upper: f64,
    /// Nominal coverage `1 - alpha`.
    pub level: f64,
    pub diagnostics: CiDiagnostics,
}

impl ConfidenceInterval {
    pub fn length(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, value: f64) -> bool {
        self.lower <= value && value <= self.upper
    }
}

/// Interval of the given method for one sample.
///
/// Every method needs at least two observations at or below `z`. The normal
/// interval is centred at the Davidson estimate.
pub fn confidence_interval(
    sample: &IncomeSample,
    z: PovertyLine,
    kind: IndexKind,
    method: CiMethod,
    alpha: f64,
) -> Result<ConfidenceInterval> {
    match method {
        CiMethod::El => crate::el::el_confidence_interval(sample, z, kind, alpha),
        CiMethod::Jel => crate::jel::jel_confidence_interval(sample, z, kind, alpha),
        CiMethod::Normal => {
            check_alpha(alpha)?;
            let q = sample.count_le(z.get());
            if q < 2 {
                return Err(PovError::NoPoorObservations { found: q, required: 2 });
            }
            let est = estimate(sample, z, kind, EstimatorMethod::Davidson);
            normal_ci(&est, &asymptotic_variance(sample, z, kind)?, alpha)
        }
    }
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(PovError::InvalidAlpha(alpha))
    }
}

/// A likelihood-ratio evaluation: the statistic (`+inf` when infeasible) and
/// the solver iterations it cost.
pub(crate) type RatioEval = (f64, usize);

pub(crate) const MAX_EXPANSIONS: usize = 60;
pub(crate) const S_TOLERANCE: f64 = 1e-7;

/// Finds `{s in [0, 1] : ratio(s) <= critical}` assuming the ratio is zero at
/// `center` and increases on either side of it.
///
/// Each side expands outward from `center` in steps of
/// `max(0.25 * center, 0.01)` doubled each time, then bisects the crossing to
/// `S_TOLERANCE`. The returned endpoint is the inner (accepted) end of the
/// final bracket.
pub(crate) fn invert_ratio<F>(mut ratio: F, center: f64, critical: f64) -> Result<(f64, f64, CiDiagnostics)>
where
    F: FnMut(f64) -> Result<RatioEval>,
{
    let mut diag = CiDiagnostics::default();
    let center = center.clamp(0.0, 1.0);
    let step = (0.25 * center).max(0.01);

    let mut eval = |s: f64, diag: &mut CiDiagnostics| -> Result<f64> {
        let (r, it) = ratio(s)?;
        diag.evaluations += 1;
        diag.solver_iterations += it;
        Ok(r)
    };

    let mut endpoints = [center; 2];
    for (side, sign) in [(0usize, -1.0f64), (1, 1.0)] {
        let bound = if sign < 0.0 { 0.0 } else { 1.0 };
        let mut inner = center;
        let mut outer = None;
        let mut at_bound = false;
        for k in 0..MAX_EXPANSIONS {
            if inner == bound {
                at_bound = true;
                break;
            }
            diag.bracket_expansions += 1;
            let cand = center + sign * step * 2f64.powi(k as i32);
            let cand = if sign < 0.0 { cand.max(bound) } else { cand.min(bound) };
            let r = eval(cand, &mut diag)?;
            if r.is_infinite() {
                diag.infeasible_endpoints = true;
            }
            if r >= critical || r.is_nan() {
                outer = Some(cand);
                break;
            }
            inner = cand;
        }
        let endpoint = match outer {
            Some(mut out) => {
                let mut inn = inner;
                while (out - inn).abs() > S_TOLERANCE {
                    let mid = 0.5 * (inn + out);
                    let r = eval(mid, &mut diag)?;
                    if r < critical {
                        inn = mid;
                    } else {
                        out = mid;
                    }
                }
                inn
            }
            None => {
                at_bound = true;
                inner
            }
        };
        if side == 0 {
            diag.lower_at_bound = at_bound;
        } else {
            diag.upper_at_bound = at_bound;
        }
        endpoints[side] = endpoint;
    }
    Ok((endpoints[0], endpoints[1], diag))
}
