//! Standard normal CDF/quantile and the chi-square(1) quantile.

use statrs::distribution::{Continuous, ContinuousCDF, Normal};

fn standard() -> Normal {
    Normal::standard()
}

pub fn normal_cdf(x: f64) -> f64 {
    standard().cdf(x)
}

pub fn normal_pdf(x: f64) -> f64 {
    standard().pdf(x)
}

/// Inverse standard normal CDF; `-inf`/`+inf` at 0 and 1, NaN outside `[0, 1]`.
pub fn normal_quantile(p: f64) -> f64 {
    if !(0.0..=1.0).contains(&p) || p.is_nan() {
        return f64::NAN;
    }
    if p == 0.0 {
        return f64::NEG_INFINITY;
    }
    if p == 1.0 {
        return f64::INFINITY;
    }
    standard().inverse_cdf(p)
}

/// Upper `alpha` critical value of chi-square with one degree of freedom,
/// i.e. the `(1 - alpha)` quantile, via `z_{alpha/2}^2`.
pub fn chi2_1_quantile(level: f64) -> f64 {
    let zq = normal_quantile(0.5 + level / 2.0);
    zq * zq
}

pub fn chi2_1_critical(alpha: f64) -> f64 {
    chi2_1_quantile(1.0 - alpha)
}
