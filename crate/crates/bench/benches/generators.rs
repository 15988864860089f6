use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use std::hint::black_box;

use ultrasmall::{generate_cm, generate_pam, quantile_sequence, PamParams, PowerLawSpec};

fn cm(c: &mut Criterion) {
    let mut group = c.benchmark_group("generate_cm");
    group.sample_size(10);
    for n in [10_000usize, 100_000] {
        let seq = quantile_sequence(PowerLawSpec { tau: 2.5, d_min: 3, n }).unwrap().fix_parity();
        group.throughput(Throughput::Elements(seq.ell()));
        group.bench_with_input(BenchmarkId::from_parameter(n), &seq, |b, seq| {
            b.iter(|| generate_cm(black_box(seq), 7).unwrap())
        });
    }
    group.finish();
}

fn pam(c: &mut Criterion) {
    let mut group = c.benchmark_group("generate_pam");
    group.sample_size(10);
    let params = PamParams::new(2, -1.0).unwrap();
    for t in [10_000u32, 100_000] {
        group.throughput(Throughput::Elements(2 * t as u64));
        group.bench_with_input(BenchmarkId::from_parameter(t), &t, |b, &t| {
            b.iter(|| generate_pam(params, black_box(t), 7).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, cm, pam);
criterion_main!(benches);
