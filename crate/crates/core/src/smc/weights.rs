//! Log-domain weight arithmetic.

use crate::error::{Error, Result};

/// `log(sum(exp(xs)))`, stable for large magnitudes.
///
/// Returns `-inf` for an empty slice or when every entry is `-inf`, and
/// NaN if any entry is NaN.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if xs.iter().any(|x| x.is_nan()) {
        return f64::NAN;
    }
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if max == f64::INFINITY {
        return f64::INFINITY;
    }
    let sum: f64 = xs.iter().map(|&x| (x - max).exp()).sum();
    max + sum.ln()
}

/// Writes the normalized weights of `log_w` into `out` and returns
/// `log_sum_exp(log_w)`.
///
/// When the log-sum-exp is not finite, `out` is left empty.
pub fn normalize_log_weights(log_w: &[f64], out: &mut Vec<f64>) -> f64 {
    out.clear();
    let max = log_w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() || log_w.iter().any(|x| x.is_nan()) {
        return log_sum_exp(log_w);
    }
    out.extend(log_w.iter().map(|&lw| (lw - max).exp()));
    let total: f64 = out.iter().sum();
    let inv = 1.0 / total;
    out.iter_mut().for_each(|w| *w *= inv);
    max + total.ln()
}

/// Effective sample size `1 / sum(W_i^2)` of normalized weights.
pub fn ess(weights: &[f64]) -> Result<f64> {
    check_normalized(weights)?;
    Ok(ess_unchecked(weights))
}

pub(crate) fn ess_unchecked(weights: &[f64]) -> f64 {
    1.0 / weights.iter().map(|w| w * w).sum::<f64>()
}

pub(crate) fn check_normalized(weights: &[f64]) -> Result<()> {
    if weights.is_empty() {
        return Err(Error::InvalidArgument("empty weight vector".into()));
    }
    if let Some(w) = weights.iter().find(|w| !(**w >= 0.0) || !w.is_finite()) {
        return Err(Error::InvalidArgument(format!("invalid weight {w}")));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!("weights sum to {total}, not 1")));
    }
    Ok(())
}
