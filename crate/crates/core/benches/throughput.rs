//! Throughput benchmarks for the hot paths: scanline synthesis (the only
//! stage heavy enough to fan out), the streaming trigger pipeline, a full
//! co-simulation, and the analytic duty sweep. Scanline batches run through
//! both the dispatching and the forced-sequential mapper so the gain from
//! the `parallel` feature is visible in one report.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use emgtrig::cosim::simulate;
use emgtrig::dsp::pipeline::run_pipeline;
use emgtrig::par::{map_slice, map_slice_seq};
use emgtrig::scenario::Scenario;
use emgtrig::sweep::run_duty_sweep;
use emgtrig::synth::emg::synth_emg;
use emgtrig::synth::ultrasound::{synth_scanline, ScanJob, UsConfig};

fn scanline_jobs(n: usize) -> Vec<ScanJob> {
    (0..n)
        .map(|i| ScanJob {
            depth_mm: 22.0 + 8.0 * (i as f64 / n as f64),
            seed: i as u64,
        })
        .collect()
}

fn bench_scanline_batch(c: &mut Criterion) {
    let cfg = UsConfig::default();
    let jobs = scanline_jobs(600);
    let mut group = c.benchmark_group("scanline_batch_600");
    group.bench_function("dispatch", |b| {
        b.iter(|| {
            map_slice(black_box(&jobs), |job| {
                synth_scanline(job.depth_mm, &cfg, job.seed).unwrap()
            })
        })
    });
    group.bench_function("sequential", |b| {
        b.iter(|| {
            map_slice_seq(black_box(&jobs), |job| {
                synth_scanline(job.depth_mm, &cfg, job.seed).unwrap()
            })
        })
    });
    group.finish();
}

fn bench_pipeline(c: &mut Criterion) {
    let scenario = Scenario::preset("isometric-3x10").unwrap();
    let (emg, _) = synth_emg(&scenario.protocol, &scenario.emg_synth, scenario.duration_s()).unwrap();
    c.bench_function("pipeline_60s", |b| {
        b.iter(|| run_pipeline(black_box(&emg), &scenario.pipeline).unwrap())
    });
}

fn bench_simulate(c: &mut Criterion) {
    let scenario = Scenario::preset("isometric-3x10").unwrap();
    let mut group = c.benchmark_group("simulate");
    group.sample_size(10);
    group.bench_function("isometric_3x10", |b| {
        b.iter(|| simulate(black_box(&scenario)).unwrap())
    });
    group.finish();
}

fn bench_duty_sweep(c: &mut Criterion) {
    let scenario = Scenario::default();
    let duties: Vec<f64> = (0..=100).map(|i| i as f64 / 100.0).collect();
    c.bench_function("duty_sweep_analytic_101", |b| {
        b.iter(|| run_duty_sweep(black_box(&scenario), &duties, false).unwrap())
    });
}

criterion_group!(
    benches,
    bench_scanline_batch,
    bench_pipeline,
    bench_simulate,
    bench_duty_sweep
);
criterion_main!(benches);
