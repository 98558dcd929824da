use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use fixdiv::fixdiv::fixdiv_matrix_exact;
use fixdiv::ideal::DEFAULT_RESIDUE_CAP;
use fixdiv::{fixdiv_ring, search_tuples, selfridge_pairs, MatR, MatrixPoly, Ring, ScalarPoly, SearchConfig};

fn pools() -> Vec<(&'static str, rayon::ThreadPool)> {
    let all = rayon::current_num_threads();
    vec![
        (
            "sequential",
            rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap(),
        ),
        (
            "parallel",
            rayon::ThreadPoolBuilder::new().num_threads(all).build().unwrap(),
        ),
    ]
}

fn bench(c: &mut Criterion) {
    let pools = pools();

    let mut g = c.benchmark_group("selfridge_pairs");
    g.sample_size(10);
    for (name, pool) in &pools {
        g.bench_function(BenchmarkId::new(*name, 48), |b| {
            b.iter(|| pool.install(|| selfridge_pairs(black_box(48)).unwrap()))
        });
    }
    g.finish();

    let q5 = Ring::quadratic(5).unwrap();
    let poly = ScalarPoly::parse(q5, "x^9 - x^3").unwrap();
    let mut g = c.benchmark_group("fixdiv_ring");
    g.sample_size(10);
    for (name, pool) in &pools {
        g.bench_function(BenchmarkId::new(*name, "Q(sqrt(-5))"), |b| {
            b.iter(|| pool.install(|| fixdiv_ring(black_box(&poly)).unwrap()))
        });
    }
    g.finish();

    let z = Ring::Integers;
    let f = MatrixPoly::from_tuple(
        &[
            MatR::from_ints(z, 2, &[1, 0, 0, 1]),
            MatR::from_ints(z, 2, &[0, -1, 1, 0]),
        ],
        &[6, 2],
    )
    .unwrap();
    let mut g = c.benchmark_group("fixdiv_matrix_exact");
    g.sample_size(10);
    for (name, pool) in &pools {
        g.bench_function(BenchmarkId::new(*name, "n=2"), |b| {
            b.iter(|| pool.install(|| fixdiv_matrix_exact(black_box(&f), DEFAULT_RESIDUE_CAP).unwrap()))
        });
    }
    g.finish();

    let coeffs = [MatR::from_ints(z, 1, &[1]), MatR::from_ints(z, 1, &[-1])];
    let two = MatR::from_ints(z, 1, &[2]);
    let config = SearchConfig::default();
    let mut g = c.benchmark_group("search_tuples");
    g.sample_size(10);
    for (name, pool) in &pools {
        g.bench_function(BenchmarkId::new(*name, 24), |b| {
            b.iter(|| pool.install(|| search_tuples(&coeffs, black_box(&two), 24, &config).unwrap()))
        });
    }
    g.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
