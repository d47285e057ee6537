//! Compares the rayon worker pool against the sequential fallback on the
//! seeded-trial workload, plus a microbenchmark of the GP line machinery
//! that dominates each optimizer step.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use subscore::gp::{equidistant_line_points, Dataset, GPModel, KernelParams, LineProbe};
use subscore::harness::{run_experiment, run_experiment_serial, RunConfig};
use subscore::optim::Strategy;

fn bench_config(seeds: usize) -> RunConfig {
    RunConfig {
        n_qbits: 3,
        n_layers: 1,
        readout_strategy: Strategy::Center,
        n_iter: 30_000,
        seeds: (0..seeds as u64).collect(),
        ..RunConfig::default()
    }
}

fn trial_pool(c: &mut Criterion) {
    let mut group = c.benchmark_group("seeded_trials");
    group.sample_size(10);
    for seeds in [2usize, 8] {
        let config = bench_config(seeds);
        group.bench_with_input(BenchmarkId::new("parallel", seeds), &config, |b, cfg| {
            b.iter(|| black_box(run_experiment(cfg).unwrap()));
        });
        group.bench_with_input(BenchmarkId::new("serial", seeds), &config, |b, cfg| {
            b.iter(|| black_box(run_experiment_serial(cfg).unwrap()));
        });
    }
    group.finish();
}

fn line_probe(c: &mut Criterion) {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(0);
    let dims = 40;
    let params = KernelParams::new(4.0, 9.0, vec![1; dims]);
    let mut data = Dataset::new();
    for _ in 0..100 {
        let p: Vec<f64> = (0..dims).map(|_| rng.random_range(0.0..std::f64::consts::TAU)).collect();
        data.push(&p, rng.random_range(-5.0..5.0), rng.random_range(0.001..0.1));
    }
    let model = GPModel::fit(data, params).unwrap();
    let center: Vec<f64> = (0..dims).map(|_| rng.random_range(0.0..std::f64::consts::TAU)).collect();
    let new_points = equidistant_line_points(&center, 0, 1);

    c.bench_function("line_probe_build", |b| {
        b.iter(|| black_box(LineProbe::new(&model, &new_points, &center, 0, 64)));
    });
    let probe = LineProbe::new(&model, &new_points, &center, 0, 64);
    c.bench_function("line_probe_query", |b| {
        b.iter(|| black_box(probe.max_variance(&[0.01, 0.01, 0.01])));
    });
}

criterion_group!(benches, trial_pool, line_probe);
criterion_main!(benches);
