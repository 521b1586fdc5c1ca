//! Rayon path against the sequential fallback on the three hot loops:
//! solver steps, estimate ensembles and counterexample quadrature.

use std::f64::consts::PI;
use std::hint::black_box;
use std::time::Duration;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use zkb::counterexample::{iterate_norm, CounterexampleParams, Interaction, Propagation};
use zkb::exec;
use zkb::grid::GridSpec;
use zkb::lab::{check_linear_estimate, EnsembleConfig};
use zkb::solver::{Mode, SolverConfig, Stepper};
use zkb::spectral::{sample_physical, to_spectral};

const PATHS: [(&str, bool); 2] = [("parallel", true), ("sequential", false)];

fn solver_step(c: &mut Criterion) {
    let g = GridSpec::new(256, 256, 64.0 * PI, 64.0 * PI).unwrap();
    let v = to_spectral(
        &g,
        (256, 256),
        &sample_physical(&g, |x, y| (-(x * x + y * y) / 32.0).exp()),
    )
    .unwrap();
    let stepper = Stepper::new(SolverConfig::new(g, 1e-3, 1.0, Mode::ZkbSymmetric)).unwrap();
    let mut group = c.benchmark_group("etdrk4_step_256");
    for (name, on) in PATHS {
        exec::set_parallel(on);
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| stepper.step(black_box(&v), 0.0))
        });
    }
    group.finish();
}

fn linear_ensemble(c: &mut Criterion) {
    let cfg = EnsembleConfig {
        count: 24,
        ..EnsembleConfig::default()
    };
    let mut group = c.benchmark_group("linear_ensemble_24");
    group.sample_size(10);
    for (name, on) in PATHS {
        exec::set_parallel(on);
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| check_linear_estimate(black_box(&cfg)).unwrap())
        });
    }
    group.finish();
}

fn counterexample(c: &mut Criterion) {
    let p = CounterexampleParams {
        quad: 32,
        ..CounterexampleParams::new(16.0, 0.0)
    };
    let mut group = c.benchmark_group("second_iterate_quad32");
    group.sample_size(10).measurement_time(Duration::from_secs(80));
    for (name, on) in PATHS {
        exec::set_parallel(on);
        // quad 32 fails the halving check; only the cost matters here
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| iterate_norm(black_box(p), Interaction::Mixed, Propagation::Free).unwrap_err())
        });
    }
    group.finish();
    exec::set_parallel(true);
}

criterion_group!(benches, solver_step, linear_ensemble, counterexample);
criterion_main!(benches);
