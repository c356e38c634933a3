//! Batch-API benchmarks: the library's batch entry points (data-parallel
//! when the `parallel` feature is on, the default) against explicit
//! sequential loops over the single-item functions. Built with
//! `--no-default-features` the two sides collapse to the same code path,
//! which is the baseline to compare against.

use criterion::{criterion_group, criterion_main, Criterion};
use ehg_core::features::{extract_rows, segment_features, FeatureConfig};
use ehg_core::klt;
use ehg_core::preprocess::{Segment, WindowKind};
use ehg_core::record::Group;
use ehg_core::rng::SplitMix64;
use std::f64::consts::PI;
use std::hint::black_box;

const FS_HZ: f64 = 20.0;
const N_SAMPLES: usize = 2400;
const N_ITEMS: usize = 8;

fn synth_signal(seed: u64) -> Vec<f64> {
    let mut rng = SplitMix64::new(seed);
    (0..N_SAMPLES)
        .map(|i| (2.0 * PI * 0.5 * i as f64 / FS_HZ).sin() + 0.5 * rng.next_gaussian())
        .collect()
}

fn klt_batch(c: &mut Criterion) {
    let signals: Vec<Vec<f64>> = (0..N_ITEMS as u64).map(synth_signal).collect();
    let mut group = c.benchmark_group("klt_denoise");
    group.sample_size(20);
    group.bench_function("batch", |b| {
        b.iter(|| {
            klt::denoise_batch(
                black_box(&signals),
                klt::DEFAULT_LAG,
                klt::DEFAULT_JUMP_THRESHOLD,
            )
            .unwrap()
        })
    });
    group.bench_function("sequential", |b| {
        b.iter(|| {
            black_box(&signals)
                .iter()
                .map(|s| klt::denoise(s, klt::DEFAULT_LAG, klt::DEFAULT_JUMP_THRESHOLD).unwrap())
                .collect::<Vec<_>>()
        })
    });
    group.finish();
}

fn feature_batch(c: &mut Criterion) {
    let segments: Vec<Segment> = (0..N_ITEMS as u64)
        .map(|s| Segment {
            record_name: format!("bench{s:02}"),
            channels: (0..3).map(|ch| synth_signal(100 + 3 * s + ch)).collect(),
            label: if s % 2 == 0 { Group::Preterm } else { Group::Term },
            window_kind: WindowKind::Fixed,
            start_sample: 0,
            end_sample: N_SAMPLES,
        })
        .collect();
    let cfg = FeatureConfig::default();
    let mut group = c.benchmark_group("feature_extraction");
    group.sample_size(20);
    group.bench_function("batch", |b| {
        b.iter(|| extract_rows(black_box(&segments), FS_HZ, &cfg))
    });
    group.bench_function("sequential", |b| {
        b.iter(|| {
            black_box(&segments)
                .iter()
                .map(|s| segment_features(s, FS_HZ, &cfg).unwrap())
                .collect::<Vec<_>>()
        })
    });
    group.finish();
}

criterion_group!(benches, klt_batch, feature_batch);
criterion_main!(benches);
