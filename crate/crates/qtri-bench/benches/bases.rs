use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use qtri_core::qlaurent::qbinom;
use qtri_core::qtorus::ExpVec;
use qtri_core::seedkit::{BipartiteQuiver, Seed, WVector};
use qtri_core::stratdata::chi_m;
use qtri_core::tribasis::{TPrimeFrame, TriangularContext};
use qtri_core::IntMat;

fn setup(rows: &[Vec<i64>]) -> (Seed, BipartiteQuiver) {
    let b = IntMat::from_rows(rows).unwrap();
    (Seed::principal(&b).unwrap(), BipartiteQuiver::from_b(&b).unwrap())
}

fn bench_basis(c: &mut Criterion) {
    let mut group = c.benchmark_group("basis");
    group.sample_size(10);

    let (s2, q2) = setup(&[vec![0, -3], vec![3, 0]]);
    group.bench_function("rank2_b3_a(9,-4)", |b| {
        b.iter(|| {
            let ctx = TriangularContext::new(&s2, &q2).unwrap();
            black_box(ctx.triangular_basis(&ExpVec(vec![9, -4, 0, 0])).unwrap())
        })
    });

    let (s3, q3) = setup(&[vec![0, 0, -2], vec![0, 0, -2], vec![2, 2, 0]]);
    group.bench_function("rank3_b2_a(4,3,-3)", |b| {
        b.iter(|| {
            let ctx = TriangularContext::new(&s3, &q3).unwrap();
            black_box(ctx.triangular_basis(&ExpVec(vec![4, 3, -3, 0, 0, 0])).unwrap())
        })
    });
    group.finish();
}

fn bench_series(c: &mut Criterion) {
    let (s, q) = setup(&[vec![0, 0, -2], vec![0, 0, -2], vec![2, 2, 0]]);
    let w = WVector::new(vec![(2, 1), (1, 2), (2, 2)]).unwrap();
    c.bench_function("chi_m_rank3", |b| b.iter(|| black_box(chi_m(&s, &q, &w))));
    c.bench_function("e_star_rank3", |b| {
        b.iter(|| {
            let frame = TPrimeFrame::new(&s, &q).unwrap();
            black_box(frame.e_star(&w, &[0, 0, 0]))
        })
    });
}

fn bench_qbinom(c: &mut Criterion) {
    c.bench_function("qbinom_24_12", |b| b.iter(|| black_box(qbinom(24, 12))));
}

criterion_group!(benches, bench_basis, bench_series, bench_qbinom);
criterion_main!(benches);
