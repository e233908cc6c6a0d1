//! End-to-end timings: polygon folding, streaming verification, exact
//! permutahedron factorization, rank computation, and rounded membership.

use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use xfold::{
    build_permutahedron_factorization, build_polygon_factors, build_rounded_system,
    membership_test, parabola_delta, rational_rank, verify_factorization_streaming,
    VerifySampling,
};
use xfold_bench::gridgon_fixture;

fn bench_polygon_factorization(c: &mut Criterion) {
    let mut group = c.benchmark_group("polygon_factorization");
    for n in [64usize, 1024, 4096] {
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| build_polygon_factors(black_box(n)).unwrap())
        });
    }
    group.finish();
}

fn bench_streaming_verification(c: &mut Criterion) {
    let (poly, h, f) = build_polygon_factors(1024).unwrap();
    c.bench_function("verify_streaming_full_1024", |b| {
        b.iter(|| {
            verify_factorization_streaming(
                black_box(&h),
                poly.vertices(),
                black_box(&f),
                1e-9,
                VerifySampling::Full,
            )
        })
    });
}

fn bench_permutahedron(c: &mut Criterion) {
    let mut group = c.benchmark_group("permutahedron_factorization");
    group.sample_size(10);
    for n in [4usize, 5] {
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| build_permutahedron_factorization(black_box(n)).unwrap())
        });
    }
    group.finish();
}

fn bench_rational_rank(c: &mut Criterion) {
    let (s, _) = build_permutahedron_factorization(5).unwrap();
    c.bench_function("rational_rank_30x120", |b| {
        b.iter(|| rational_rank(black_box(s.mat())))
    });
}

fn bench_rounded_membership(c: &mut Criterion) {
    let (_, h, _, f) = gridgon_fixture(6);
    let delta = parabola_delta(6).unwrap();
    let rs = build_rounded_system(&h, &f, &delta).unwrap();
    c.bench_function("rounded_membership_gridgon_6", |b| {
        b.iter(|| {
            // One interior, one boundary, one far outside.
            membership_test(black_box(&rs), &[3, 7]).unwrap();
            membership_test(black_box(&rs), &[1, 1]).unwrap();
            membership_test(black_box(&rs), &[12, 1]).unwrap();
        })
    });
}

criterion_group!(
    benches,
    bench_polygon_factorization,
    bench_streaming_verification,
    bench_permutahedron,
    bench_rational_rank,
    bench_rounded_membership,
);
criterion_main!(benches);
