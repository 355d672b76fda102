use criterion::{black_box, criterion_group, criterion_main, Criterion};

use ietflow::partitions::balance_scan;
use ietflow::rauzy::{induce, rauzy_class};
use ietflow::{Iet, Scalar};

fn rational_four() -> Iet {
    let lambda = [31, 17, 29, 23]
        .iter()
        .map(|&n| Scalar::ratio(n, 100))
        .collect();
    Iet::new(vec![0, 1, 2, 3], vec![3, 2, 1, 0], lambda).unwrap()
}

fn induction(c: &mut Criterion) {
    let golden = Iet::golden();
    c.bench_function("induce golden 200", |b| {
        b.iter(|| induce(black_box(&golden), 200).unwrap())
    });
    let t = rational_four();
    c.bench_function("induce rational r=4 6 steps", |b| {
        b.iter(|| induce(black_box(&t), 6).unwrap())
    });
    c.bench_function("rauzy class r=6", |b| {
        b.iter(|| rauzy_class(black_box(&[0, 1, 2, 3, 4, 5]), &[5, 4, 3, 2, 1, 0]).unwrap())
    });
}

fn partitions(c: &mut Criterion) {
    let golden = Iet::golden();
    let mut g = c.benchmark_group("balance");
    g.sample_size(10);
    g.bench_function("golden j<=1000", |b| {
        b.iter(|| balance_scan(black_box(&golden), 1000, None).unwrap())
    });
    g.finish();
}

criterion_group!(benches, induction, partitions);
criterion_main!(benches);
