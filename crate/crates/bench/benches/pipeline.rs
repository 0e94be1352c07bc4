use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use vsense_bench::{cube, phase, profiles, spec, spectra, N_FFT};
use vsense_core::aoa::range_angle_heatmap;
use vsense_core::frontend::range_fft;
use vsense_core::pipeline::run_scenario;
use vsense_core::vital::{adaptive_weights, select_mode_count, truncate_spectrum, wmc_vmd, ChannelWeights, VmdParams};
use vsense_core::{AngleGrid, Window};

fn frontend(c: &mut Criterion) {
    let raw = cube(5.0);
    c.bench_function("range_fft_5s", |b| {
        b.iter(|| range_fft(black_box(&raw), N_FFT, Window::Hann).unwrap())
    });
    let p = profiles(5.0);
    let grid = AngleGrid::default();
    c.bench_function("mvdr_heatmap_20_chirps", |b| {
        b.iter(|| range_angle_heatmap(black_box(&p), &grid, 1e-3, 0, 20).unwrap())
    });
}

fn vital(c: &mut Criterion) {
    let s = phase(50.0);
    c.bench_function("adaptive_weights", |b| {
        b.iter(|| adaptive_weights(black_box(&s)).unwrap())
    });
    let w = adaptive_weights(&s).unwrap();
    let combined = w.combine(&s).unwrap();
    c.bench_function("ssa_mode_count", |b| {
        b.iter(|| select_mode_count(black_box(&combined), combined.len() / 3, 0.7, 2, 8).unwrap())
    });

    let full = spectra(50.0);
    let params = VmdParams {
        alpha: 200.0,
        ..VmdParams::default()
    };
    let uniform = ChannelWeights::uniform(full.channels());
    let mut group = c.benchmark_group("wmc_vmd");
    for n_keep in [full.bin_count(), 200, 100] {
        let spec = truncate_spectrum(&full, n_keep).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n_keep), &spec, |b, s| {
            b.iter(|| wmc_vmd(black_box(s), &uniform, 2, &params).unwrap())
        });
    }
    group.finish();
}

fn end_to_end(c: &mut Criterion) {
    let s = spec(30.0);
    let mut group = c.benchmark_group("pipeline");
    group.sample_size(10);
    group.bench_function("clean_30s", |b| b.iter(|| run_scenario(black_box(&s))));
    group.finish();
}

criterion_group!(benches, frontend, vital, end_to_end);
criterion_main!(benches);
