use afr_core::afr::Envelope;
use afr_core::gen::random_fleet;
use afr_core::{build_afr_with, BuildOptions};
use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

fn single_threaded() -> BuildOptions {
    BuildOptions { threads: Some(1), contributions: false }
}

fn by_fleet_size(c: &mut Criterion) {
    let mut group = c.benchmark_group("build/N at T=10");
    for n in [50, 100, 200, 400] {
        let rs = random_fleet(1, n, 10);
        group.bench_with_input(BenchmarkId::from_parameter(n), &rs, |b, rs| {
            b.iter(|| build_afr_with(black_box(rs), &single_threaded()).unwrap())
        });
    }
    group.finish();
}

fn by_horizon(c: &mut Criterion) {
    let mut group = c.benchmark_group("build/T at N=50");
    for horizon in [6, 8, 10, 12] {
        let rs = random_fleet(2, 50, horizon);
        group.bench_with_input(BenchmarkId::from_parameter(horizon), &rs, |b, rs| {
            b.iter(|| build_afr_with(black_box(rs), &single_threaded()).unwrap())
        });
    }
    group.finish();
}

fn support_table(c: &mut Criterion) {
    let rs = random_fleet(3, 1, 12);
    let r = rs.get(0);
    c.bench_function("support table/exact T=12", |b| b.iter(|| Envelope::exact(black_box(r)).support_table()));
}

criterion_group!(benches, by_fleet_size, by_horizon, support_table);
criterion_main!(benches);
