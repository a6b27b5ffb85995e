use afr_core::afr::{afr_as_system, disaggregate};
use afr_core::build_afr;
use afr_core::fme::aggregate_projection_oracle;
use afr_core::gen::random_fleet;
use afr_core::rational::int;
use criterion::{black_box, criterion_group, criterion_main, Criterion};

fn oracle(c: &mut Criterion) {
    let mut group = c.benchmark_group("fme oracle");
    group.sample_size(10);
    for (n, horizon) in [(2, 3), (3, 3), (2, 4)] {
        let rs = random_fleet(5, n, horizon);
        group.bench_function(format!("N={n} T={horizon}"), |b| {
            b.iter(|| aggregate_projection_oracle(black_box(&rs)).unwrap())
        });
    }
    group.finish();
}

fn lp(c: &mut Criterion) {
    let rs = random_fleet(6, 3, 5);
    let m = build_afr(&rs).unwrap();
    let sys = afr_as_system(&m);
    let objective: Vec<_> = (0..5).map(|t| (t, int(if t % 2 == 0 { 1 } else { -1 }))).collect();
    c.bench_function("lp/vertex of a T=5 AFR", |b| b.iter(|| sys.sample_vertex(black_box(&objective)).unwrap()));
    let vertex = sys.sample_vertex(&objective).unwrap();
    c.bench_function("lp/disaggregate N=3 T=5", |b| {
        b.iter(|| disaggregate(black_box(&rs), black_box(&vertex)).unwrap())
    });
}

criterion_group!(benches, oracle, lp);
criterion_main!(benches);
