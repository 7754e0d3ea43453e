use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use nikhp_bench::reference_system;
use nikhp_core::hermite_pade::{certify_perfectness, solve_type_i, solve_type_ii};
use nikhp_core::potential::{solve_vector_equilibrium, InteractionMatrix};
use nikhp_core::MultiIndex;

fn solves(c: &mut Criterion) {
    let sys = reference_system(256, 64);
    let mut g = c.benchmark_group("solve");
    for k in [2, 4, 8] {
        let n = MultiIndex::diagonal(2, k).unwrap();
        g.bench_with_input(BenchmarkId::new("type_ii", k), &n, |b, n| {
            b.iter(|| solve_type_ii(sys.clone(), black_box(n)).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("type_i", k), &n, |b, n| {
            b.iter(|| solve_type_i(sys.clone(), black_box(n)).unwrap())
        });
    }
    g.finish();
}

fn zeros(c: &mut Criterion) {
    let sys = reference_system(256, 64);
    let n = MultiIndex::diagonal(2, 6).unwrap();
    c.bench_function("psi zeros (6,6)", |b| {
        b.iter(|| {
            let f = solve_type_ii(sys.clone(), &n).unwrap();
            f.psi_zeros(1).unwrap().len()
        })
    });
}

fn certify(c: &mut Criterion) {
    let sys = reference_system(256, 64);
    let mut g = c.benchmark_group("certify");
    g.sample_size(10);
    g.bench_function("budget 6", |b| b.iter(|| certify_perfectness(&sys, black_box(6)).pass));
    g.finish();
}

fn equilibrium(c: &mut Criterion) {
    let m = InteractionMatrix::nikishin(&[0.5, 0.5]).unwrap();
    let sets = [(-1.0, 1.0), (2.0, 3.0)];
    let mut g = c.benchmark_group("equilibrium");
    g.sample_size(10);
    for grid in [200, 400] {
        g.bench_with_input(BenchmarkId::from_parameter(grid), &grid, |b, &grid| {
            b.iter(|| solve_vector_equilibrium(&sets, &m, grid).unwrap().kkt)
        });
    }
    g.finish();
}

criterion_group!(benches, solves, zeros, certify, equilibrium);
criterion_main!(benches);
