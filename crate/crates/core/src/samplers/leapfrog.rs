use crate::error::{Error, Result};

/// A point in phase space.
#[derive(Debug, Clone, PartialEq)]
pub struct PhasePoint {
    pub theta: Vec<f64>,
    pub momentum: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct LeapfrogPath {
    pub theta: Vec<f64>,
    pub momentum: Vec<f64>,
    /// Gradient of the log target at the endpoint.
    pub grad: Vec<f64>,
    /// Full-step states, starting point included (`L + 1` entries).
    pub trace: Vec<PhasePoint>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HamiltonianValue {
    pub potential: f64,
    pub kinetic: f64,
    pub total: f64,
}

/// `r . r / 2` (identity mass matrix).
pub fn kinetic_energy(r: &[f64]) -> f64 {
    0.5 * r.iter().map(|x| x * x).sum::<f64>()
}

pub fn hamiltonian(potential: f64, r: &[f64]) -> HamiltonianValue {
    let kinetic = kinetic_energy(r);
    HamiltonianValue { potential, kinetic, total: potential + kinetic }
}

/// `L` Störmer-Verlet steps of size `eps` for the potential
/// `U = -log target`, where `grad` returns `grad log target`.
///
/// Each step is
///
/// ```text
/// r <- r + (eps/2) grad(theta)
/// theta <- theta + eps r
/// r <- r + (eps/2) grad(theta)
/// ```
///
/// with the gradient at each intermediate point evaluated once.
pub fn leapfrog<F>(mut grad: F, theta0: &[f64], r0: &[f64], steps: usize, eps: f64) -> Result<LeapfrogPath>
where
    F: FnMut(&[f64]) -> Result<Vec<f64>>,
{
    let g0 = grad(theta0)?;
    leapfrog_from(grad, theta0, r0, &g0, steps, eps)
}

/// As [`leapfrog`], with the gradient at `theta0` already known.
///
/// Errors from `grad` abort the trajectory and are returned unchanged; a
/// non-finite gradient becomes [`Error::Divergence`].
pub fn leapfrog_from<F>(
    mut grad: F,
    theta0: &[f64],
    r0: &[f64],
    g0: &[f64],
    steps: usize,
    eps: f64,
) -> Result<LeapfrogPath>
where
    F: FnMut(&[f64]) -> Result<Vec<f64>>,
{
    let dim = theta0.len();
    if r0.len() != dim || g0.len() != dim {
        return Err(Error::InvalidArgument(format!(
            "position, momentum and gradient lengths differ: {dim}, {}, {}",
            r0.len(),
            g0.len()
        )));
    }
    if steps < 1 || !(eps > 0.0) {
        return Err(Error::InvalidArgument(format!("need L >= 1 and eps > 0, got L = {steps}, eps = {eps}")));
    }
    if g0.iter().any(|g| !g.is_finite()) {
        return Err(Error::Divergence { step: 0 });
    }
    let half = 0.5 * eps;
    let mut theta = theta0.to_vec();
    let mut r = r0.to_vec();
    let mut g = g0.to_vec();
    let mut trace = Vec::with_capacity(steps + 1);
    trace.push(PhasePoint { theta: theta.clone(), momentum: r.clone() });

    for step in 1..=steps {
        for ((t, ri), gi) in theta.iter_mut().zip(r.iter_mut()).zip(&g) {
            *ri += half * gi;
            *t += eps * *ri;
        }
        g = grad(&theta)?;
        if g.len() != dim {
            return Err(Error::InvalidArgument(format!("gradient has length {}, expected {dim}", g.len())));
        }
        if g.iter().any(|x| !x.is_finite()) {
            return Err(Error::Divergence { step });
        }
        for (ri, gi) in r.iter_mut().zip(&g) {
            *ri += half * gi;
        }
        trace.push(PhasePoint { theta: theta.clone(), momentum: r.clone() });
    }
    Ok(LeapfrogPath { theta, momentum: r, grad: g, trace })
}
