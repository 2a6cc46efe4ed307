use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use densecert::engel::engel_digits;
use densecert::exactnum::rat;
use densecert::{Limits, RealSpec};
use densecert_bench::{e_minus_2, log_ratio, sqrt2_minus_1};

fn digits(c: &mut Criterion) {
    let limits = Limits::default();
    let mut g = c.benchmark_group("engel_digits");
    for count in [15usize, 60] {
        g.bench_with_input(BenchmarkId::new("e-2", count), &count, |b, &n| {
            b.iter(|| engel_digits(black_box(&e_minus_2()), n, &limits).unwrap())
        });
    }
    g.bench_function("sqrt2-1/12", |b| {
        b.iter(|| engel_digits(black_box(&sqrt2_minus_1()), 12, &limits).unwrap())
    });
    g.bench_function("ln2/ln3/10", |b| {
        b.iter(|| engel_digits(black_box(&log_ratio()), 10, &limits).unwrap())
    });
    let x = RealSpec::rational(rat(654_321, 999_983));
    g.bench_function("rational", |b| {
        b.iter(|| engel_digits(black_box(&x), 10_000, &limits).unwrap())
    });
    g.finish();
}

criterion_group!(benches, digits);
criterion_main!(benches);
