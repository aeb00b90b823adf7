use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use qtclone::photonics::{hom_scan, ScanMode};
use qtclone::protocols::universality_sweep;
use qtclone::{Execution, PureState};

fn grid(steps: usize) -> Vec<f64> {
    (0..steps)
        .map(|i| -120.0 + 240.0 * i as f64 / (steps - 1) as f64)
        .collect()
}

fn scans(c: &mut Criterion) {
    let phi = PureState::basis("S", 0).unwrap();
    let zs = grid(49);
    let mut group = c.benchmark_group("hom_scan");
    group.sample_size(10);
    for exec in [Execution::Sequential, Execution::Parallel] {
        group.bench_with_input(BenchmarkId::new("exact", format!("{exec:?}")), &exec, |b, &exec| {
            b.iter(|| hom_scan(black_box(&phi), &zs, 80.0, ScanMode::Exact, exec).unwrap())
        });
        let mc = ScanMode::MonteCarlo {
            trials: 20_000,
            seed: 42,
        };
        group.bench_with_input(
            BenchmarkId::new("monte_carlo_20k", format!("{exec:?}")),
            &exec,
            |b, &exec| b.iter(|| hom_scan(black_box(&phi), &zs, 80.0, mc, exec).unwrap()),
        );
    }
    group.finish();
}

fn sweeps(c: &mut Criterion) {
    let mut group = c.benchmark_group("universality_sweep");
    group.sample_size(10);
    for exec in [Execution::Sequential, Execution::Parallel] {
        group.bench_with_input(BenchmarkId::new("haar_100", format!("{exec:?}")), &exec, |b, &exec| {
            b.iter(|| universality_sweep(100, black_box(7), exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, scans, sweeps);
criterion_main!(benches);
