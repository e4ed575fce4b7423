use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use bethe_potts::exec::Execution;
use bethe_potts::oracle::enumerate_partition_with;
use bethe_potts::phase::{classify_phase, diagram_params};
use bethe_potts::{BoltzmannParams, BoundaryKind, Spin};

fn enumeration(c: &mut Criterion) {
    let p = BoltzmannParams::from_thetas(1.7, 0.8, 2.6).unwrap();
    let mut group = c.benchmark_group("enumerate_partition");
    group.sample_size(10);
    for depth in [2, 3] {
        for exec in [Execution::Sequential, Execution::Parallel] {
            group.bench_with_input(BenchmarkId::new(format!("{exec:?}"), depth), &depth, |b, &n| {
                b.iter(|| enumerate_partition_with(n, BoundaryKind::Const(Spin::S1), &p, exec).unwrap())
            });
        }
    }
    group.finish();
}

fn grid_sweep(c: &mut Criterion) {
    let points: Vec<(f64, f64)> =
        (0..40).flat_map(|i| (0..40).map(move |k| (i as f64 * 0.125, 0.05 + k as f64 * 0.035))).collect();
    let mut group = c.benchmark_group("phase_grid_1600");
    for exec in [Execution::Sequential, Execution::Parallel] {
        group.bench_function(format!("{exec:?}"), |b| {
            b.iter(|| exec.map(&points, |&(j, t)| classify_phase(&diagram_params(j, t).unwrap()).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, enumeration, grid_sweep);
criterion_main!(benches);
