//! Analytic parameter gradients against central finite differences, and
//! normalization of every density.

use phmc_core::diagnostics::finite_difference_score;
use phmc_core::model::{gradient_of, LinearGaussianModel, PoissonCountModel, StateSpaceModel};
use phmc_core::rng::RngSeed;
use rand::Rng;

const DELTA: f64 = 1e-5;

fn assert_close(analytic: &[f64], numeric: &[f64], what: &str) {
    for (k, (a, n)) in analytic.iter().zip(numeric).enumerate() {
        let tol = f64::max(1e-6, 1e-4 * a.abs());
        assert!((a - n).abs() <= tol, "{what}, component {k}: analytic {a}, numeric {n}");
    }
}

fn check_point<M: StateSpaceModel<State = f64>>(m: &M, theta: &[f64], h: f64, h_prev: f64, y: M::Obs) {
    let d = m.dim();
    let fd = |f: &dyn Fn(&[f64]) -> f64| finite_difference_score(f, theta, DELTA);
    assert_close(&gradient_of(d, |o| m.add_grad_log_init(theta, &h, o)), &fd(&|t| m.log_init(t, &h)), "init");
    assert_close(
        &gradient_of(d, |o| m.add_grad_log_trans(theta, &h, &h_prev, o)),
        &fd(&|t| m.log_trans(t, &h, &h_prev)),
        "transition",
    );
    assert_close(&gradient_of(d, |o| m.add_grad_log_obs(theta, &y, &h, o)), &fd(&|t| m.log_obs(t, &y, &h)), "observation");
    assert_close(&gradient_of(d, |o| m.add_grad_log_prior(theta, o)), &fd(&|t| m.log_prior(t)), "prior");
}

#[test]
fn poisson_gradients_at_random_points() {
    let m = PoissonCountModel::new();
    let mut rng = RngSeed(101).rng();
    for _ in 0..100 {
        let theta = [rng.random_range(-0.95..0.95), rng.random_range(-2.0..2.0), rng.random_range(0.2..2.0)];
        let y = rng.random_range(0..20u64);
        check_point(&m, &theta, rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0), y);
    }
}

#[test]
fn lgssm_gradients_at_random_points() {
    let mut rng = RngSeed(102).rng();
    for case in 0..100 {
        let d = 1 + case % 5;
        let m = LinearGaussianModel::new(d).unwrap();
        let mut theta: Vec<f64> = (0..d).map(|_| rng.random_range(-2.0..2.0)).collect();
        theta.push(rng.random_range(0.2..2.0));
        theta.push(rng.random_range(0.2..2.0));
        theta.push(rng.random_range(-0.95..0.95));
        let y: f64 = rng.random_range(-3.0..3.0);
        check_point(&m, &theta, rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0), y);
    }
}

/// Trapezoid rule over a wide grid.
fn integrate(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
    let n = 20_000;
    let dx = (hi - lo) / n as f64;
    (0..=n)
        .map(|i| {
            let w = if i == 0 || i == n { 0.5 } else { 1.0 };
            w * f(lo + i as f64 * dx)
        })
        .sum::<f64>()
        * dx
}

#[test]
fn densities_integrate_to_one() {
    let p = PoissonCountModel::new();
    let theta = [0.7, 0.3, 0.5];
    assert!((integrate(|h| p.log_init(&theta, &h).exp(), -10.0, 10.0) - 1.0).abs() < 1e-6);
    assert!((integrate(|h| p.log_trans(&theta, &h, &0.4).exp(), -10.0, 10.0) - 1.0).abs() < 1e-6);
    let mass: f64 = (0..200u64).map(|y| p.log_obs(&theta, &y, &1.2).exp()).sum();
    assert!((mass - 1.0).abs() < 1e-10);

    let g = LinearGaussianModel::new(3).unwrap();
    let theta = [0.2, -0.4, 0.5, 0.6, 0.3, -0.5];
    assert!((integrate(|h| g.log_init(&theta, &h).exp(), -10.0, 10.0) - 1.0).abs() < 1e-6);
    assert!((integrate(|h| g.log_trans(&theta, &h, &-0.8).exp(), -10.0, 10.0) - 1.0).abs() < 1e-6);
    assert!((integrate(|y| g.log_obs(&theta, &y, &0.9).exp(), -10.0, 10.0) - 1.0).abs() < 1e-6);
}

#[test]
fn priors_vanish_exactly_off_support() {
    let p = PoissonCountModel::new();
    for theta in [[1.0, 0.0, 0.5], [-1.2, 0.0, 0.5], [0.5, 0.0, 0.0], [0.5, 0.0, -1.0]] {
        assert!(!p.in_support(&theta));
        assert_eq!(p.log_prior(&theta), f64::NEG_INFINITY);
    }
    let g = LinearGaussianModel::new(2).unwrap();
    for theta in [[0.0, 0.0, 0.0, 0.5, 0.5], [0.0, 0.0, 0.5, -0.1, 0.5], [0.0, 0.0, 0.5, 0.5, 1.0]] {
        assert!(!g.in_support(&theta));
        assert_eq!(g.log_prior(&theta), f64::NEG_INFINITY);
    }
    let inside = [0.3, -0.2, 0.5, 0.5, 0.1];
    assert!(g.in_support(&inside) && g.log_prior(&inside).is_finite());
}

#[test]
fn stationary_start_reduces_without_autocorrelation() {
    let p = PoissonCountModel::new();
    let g = LinearGaussianModel::new(1).unwrap();
    let s: f64 = 0.7;
    for h in [-1.5, 0.0, 0.3, 2.0] {
        let want = -0.5 * (2.0 * std::f64::consts::PI * s * s).ln() - h * h / (2.0 * s * s);
        assert!((p.log_init(&[0.0, 0.4, s], &h) - want).abs() < 1e-12);
        assert!((g.log_init(&[0.9, 0.3, s, 0.0], &h) - want).abs() < 1e-12);
    }
}
