use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use locc_core::experiments::{estimate_conversion_probability, ExperimentConfig};
use locc_core::rng::task_stream;
use locc_core::sampling::{DenseSampler, TridiagonalSampler};

fn samplers(c: &mut Criterion) {
    let mut group = c.benchmark_group("spectrum");
    for n in [8usize, 32, 64] {
        group.bench_with_input(BenchmarkId::new("tridiagonal", n), &n, |b, &n| {
            let mut s = TridiagonalSampler::new(n, 2 * n).unwrap();
            let mut rng = task_stream(1, 0);
            b.iter(|| s.sample(&mut rng).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("dense", n), &n, |b, &n| {
            let s = DenseSampler::new(n, 2 * n).unwrap();
            let mut rng = task_stream(1, 0);
            b.iter(|| s.sample(&mut rng))
        });
    }
    group.finish();
}

/// One worker against the full pool. Without the `parallel` feature both
/// rows run the sequential path.
fn workers(c: &mut Criterion) {
    let mut group = c.benchmark_group("conversion");
    group.sample_size(10);
    for n in [16usize, 128] {
        for (label, w) in [("sequential", 1), ("all-threads", 0)] {
            let cfg = ExperimentConfig::with_c(n, 2.0, 8192, 3).workers(w);
            group.bench_with_input(BenchmarkId::new(label, n), &cfg, |b, cfg| {
                b.iter(|| estimate_conversion_probability(cfg).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, samplers, workers);
criterion_main!(benches);
