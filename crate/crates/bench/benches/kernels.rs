use criterion::{criterion_group, criterion_main, BatchSize, BenchmarkId, Criterion, Throughput};
use std::hint::black_box;

use oilcast_bench::{batch, correlated_pair, paper_config};
use oilcast_core::correlation::{autocorrelation, pearson, windowed_correlations, VarianceForm};
use oilcast_core::nn::{adam_step, backward, forward_with_masks, init_params, AdamConfig, AdamState};

fn lstm(c: &mut Criterion) {
    let config = paper_config();
    let params = init_params(&config, 1).unwrap();
    let (inputs, targets) = batch(&config, 25);
    let mut group = c.benchmark_group("lstm_batch25");
    group.sample_size(20);
    group.bench_function("forward", |b| {
        b.iter(|| forward_with_masks(black_box(&params), &config, black_box(&inputs), None).unwrap())
    });
    let (_, cache) = forward_with_masks(&params, &config, &inputs, None).unwrap();
    group.bench_function("backward", |b| {
        b.iter(|| backward(black_box(&params), &config, black_box(&cache), &targets).unwrap())
    });
    let grads = backward(&params, &config, &cache, &targets).unwrap();
    group.bench_function("adam_step", |b| {
        b.iter_batched(
            || (params.clone(), AdamState::new(AdamConfig::default(), &params)),
            |(mut p, mut s)| adam_step(&mut p, &grads, &mut s).unwrap(),
            BatchSize::LargeInput,
        )
    });
    group.finish();
}

fn correlation(c: &mut Criterion) {
    let mut group = c.benchmark_group("correlation");
    for n in [2_000usize, 20_000] {
        let (a, b) = correlated_pair(n);
        group.throughput(Throughput::Elements(n as u64));
        group.bench_with_input(BenchmarkId::new("pearson", n), &n, |bench, _| {
            bench.iter(|| pearson(black_box(&a), black_box(&b)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("windowed_40", n), &n, |bench, _| {
            bench.iter(|| windowed_correlations(("a", "b"), &a, &b, 40, VarianceForm::Population).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("acf_60", n), &n, |bench, _| {
            bench.iter(|| autocorrelation("a", black_box(&a), 60).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, lstm, correlation);
criterion_main!(benches);
