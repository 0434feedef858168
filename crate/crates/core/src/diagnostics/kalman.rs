use crate::error::{Error, Result};
use crate::model::{check_dim, LinearGaussianModel};

/// Exact `log p(y_{1:T} | theta)` for the linear-Gaussian model by the
/// Kalman filter, started from the stationary law `N(0, s_h^2 / (1 - rho^2))`.
pub fn kalman_log_likelihood(model: &LinearGaussianModel, theta: &[f64], y: &[f64]) -> Result<f64> {
    check_dim(theta, model.shifts() + 3)?;
    let rho = theta[model.rho_index()];
    let sy = theta[model.sigma_y_index()];
    let sh = theta[model.sigma_h_index()];
    if !(rho.abs() < 1.0) || !(sy > 0.0) || !(sh > 0.0) {
        return Err(Error::Domain(format!("Kalman filter needs |rho| < 1 and positive scales, got {theta:?}")));
    }
    if y.is_empty() {
        return Err(Error::InvalidArgument("empty observation series".into()));
    }
    let drift = model.drift(theta);
    let (vy, vh) = (sy * sy, sh * sh);
    let mut mean = 0.0;
    let mut var = vh / (1.0 - rho * rho);
    let mut ll = 0.0;
    for (t, &obs) in y.iter().enumerate() {
        if t > 0 {
            mean = rho * mean + drift;
            var = rho * rho * var + vh;
        }
        let s = var + vy;
        let e = obs - mean;
        ll -= 0.5 * ((2.0 * std::f64::consts::PI * s).ln() + e * e / s);
        let gain = var / s;
        mean += gain * e;
        var *= 1.0 - gain;
    }
    Ok(ll)
}
