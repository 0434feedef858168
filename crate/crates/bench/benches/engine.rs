use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use std::hint::black_box;

use phmc_bench::{count_series, COUNT_THETA};
use phmc_core::gradients::{score_quadratic_step, PathGradientTable, ScoreKind};
use phmc_core::rng::RngSeed;
use phmc_core::samplers::leapfrog;
use phmc_core::smc::{run_filter, FilterConfig};

fn filter(c: &mut Criterion) {
    let (m, y) = count_series(100);
    let mut group = c.benchmark_group("filter_t100");
    for n in [100usize, 500, 1000] {
        group.throughput(Throughput::Elements((n * y.len()) as u64));
        for (label, kind) in [("none", None), ("linear", Some(ScoreKind::Linear))] {
            group.bench_with_input(BenchmarkId::new(label, n), &n, |b, &n| {
                let cfg = FilterConfig::new(n);
                let mut rng = RngSeed(3).rng();
                b.iter(|| run_filter(&m, &COUNT_THETA, &y, &cfg, &mut rng, kind).unwrap().log_z)
            });
        }
    }
    group.finish();
}

fn quadratic_step(c: &mut Criterion) {
    let (m, y) = count_series(2);
    let mut group = c.benchmark_group("quadratic_step");
    for n in [100usize, 500] {
        let fit = run_filter(&m, &COUNT_THETA, &y, &FilterConfig::new(n), &mut RngSeed(4).rng(), None).unwrap();
        let sys = &fit.system;
        let g = PathGradientTable::zeros(n, 3);
        group.throughput(Throughput::Elements((n * n) as u64));
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| {
                score_quadratic_step(&m, &COUNT_THETA, &sys.particles[0], &sys.weights[0], &g, &sys.particles[1], &y[1])
                    .unwrap()
            })
        });
    }
    group.finish();
}

fn leapfrog_quadratic(c: &mut Criterion) {
    let grad = |t: &[f64]| Ok(t.iter().map(|x| -x).collect());
    let theta = vec![0.5; 10];
    let r = vec![1.0; 10];
    c.bench_function("leapfrog_d10_l20", |b| {
        b.iter(|| leapfrog(grad, black_box(&theta), black_box(&r), 20, 0.1).unwrap().theta[0])
    });
}

criterion_group!(benches, filter, quadratic_step, leapfrog_quadratic);
criterion_main!(benches);
