use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use ultrasmall::structure::CmExplorer;
use ultrasmall::{bfs, census_mkc_cm, diameter, DiameterMethod};
use ultrasmall_bench::{cm_fixture, pam_fixture};

fn bfs_single(c: &mut Criterion) {
    let g = cm_fixture(100_000, 1);
    c.bench_function("bfs/cm_100k", |b| b.iter(|| bfs(&g, black_box(0)).unwrap()));
}

fn diameters(c: &mut Criterion) {
    let mut group = c.benchmark_group("diameter_ifub");
    group.sample_size(10);
    for n in [10_000usize, 100_000] {
        let g = cm_fixture(n, 2);
        group.bench_with_input(BenchmarkId::new("cm", n), &g, |b, g| {
            b.iter(|| diameter(g, DiameterMethod::Ifub).unwrap())
        });
        let p = pam_fixture(n as u32, 2).undirected_view();
        group.bench_with_input(BenchmarkId::new("pam", n), &p, |b, g| {
            b.iter(|| diameter(g, DiameterMethod::Ifub).unwrap())
        });
    }
    group.finish();
}

fn structure(c: &mut Criterion) {
    let g = cm_fixture(100_000, 3);
    c.bench_function("census_mkc_cm/k2_100k", |b| b.iter(|| census_mkc_cm(&g, black_box(2)).unwrap()));
    c.bench_function("explore_cm/k3_all_roots_10k", |b| {
        let small = cm_fixture(10_000, 3);
        b.iter(|| {
            let mut ex = CmExplorer::new(&small);
            (0..small.n() as u32).map(|v| ex.explore(v, 3, None).unwrap().collisions.len()).sum::<usize>()
        })
    });
}

criterion_group!(benches, bfs_single, diameters, structure);
criterion_main!(benches);
