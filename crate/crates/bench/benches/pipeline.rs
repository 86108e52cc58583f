use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use shotmem_bench::{annotation, histogram_sequence, shots, signal_values, training_set};
use shotmem_core::regressor::fit;
use shotmem_core::shots::detect_shots_histogram;
use shotmem_core::signal::moving_average;
use shotmem_core::{align_shots, FitOptions};

fn bench_fit(c: &mut Criterion) {
    let set = training_set(200, 16, 1);
    let big = training_set(3000, 128, 2);
    let opts = FitOptions::default();
    c.bench_function("fit_200x16", |b| b.iter(|| fit(black_box(&set), &opts).unwrap()));
    c.bench_function("fit_3000x128", |b| b.iter(|| fit(black_box(&big), &opts).unwrap()));
}

fn bench_smoothing(c: &mut Criterion) {
    let values = signal_values(1000, 3);
    c.bench_function("moving_average_1000_w305", |b| b.iter(|| moving_average(black_box(&values), 305)));
    c.bench_function("moving_average_sweep_1000", |b| {
        b.iter(|| (15..=305).step_by(10).map(|w| moving_average(black_box(&values), w)).collect::<Vec<_>>())
    });
}

fn bench_detection(c: &mut Criterion) {
    let seq = histogram_sequence(60_000, 75);
    c.bench_function("detect_shots_60000_frames", |b| {
        b.iter(|| detect_shots_histogram("bench", black_box(&seq), 0.5, 500).unwrap())
    });
}

fn bench_alignment(c: &mut Criterion) {
    let shots = shots(1000, 3000);
    let ann = annotation(1500, 2000);
    c.bench_function("align_1000_shots", |b| b.iter(|| align_shots(black_box(&shots), &ann)));
}

criterion_group!(benches, bench_fit, bench_smoothing, bench_detection, bench_alignment);
criterion_main!(benches);
