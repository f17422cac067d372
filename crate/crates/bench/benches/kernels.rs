use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use lwpm::harness::gen_random_matrix;
use lwpm::reductions::{reverse_reduce, reverse_system, Rhs};
use lwpm::search::{hill_climb, simulated_anneal};
use lwpm::{AffineSystem, BitVec, Gf2Poly, Projection, SolverConfig, ToeplitzOperator};

fn dense_poly(degree: usize, seed: u64) -> Gf2Poly {
    let row = gen_random_matrix(1, degree, 0.5, seed).unwrap();
    let mut exps: Vec<usize> = row.row(0).iter_ones().collect();
    exps.push(degree);
    Gf2Poly::from_exponents(exps)
}

fn poly_mul(c: &mut Criterion) {
    let mut group = c.benchmark_group("poly_mul");
    for degree in [128, 1024, 8192] {
        let (p, q) = (dense_poly(degree, 1), dense_poly(degree, 2));
        group.bench_with_input(BenchmarkId::from_parameter(degree), &degree, |b, _| {
            b.iter(|| black_box(&p).mul(black_box(&q)))
        });
    }
    group.finish();
}

fn matvec(c: &mut Criterion) {
    let mut group = c.benchmark_group("toeplitz_matvec");
    for (degree, t) in [(40, 30), (400, 200), (1000, 500)] {
        let op = ToeplitzOperator::build(&dense_poly(degree, 3), t).unwrap();
        let v = BitVec::from_fn(t + 1, |j| j % 3 == 0);
        group.bench_function(format!("{degree}x{t}"), |b| b.iter(|| op.matvec(black_box(&v)).unwrap()));
    }
    group.finish();
}

fn local_search(c: &mut Criterion) {
    let a = gen_random_matrix(400, 200, 0.5, 7).unwrap();
    let system = reverse_system(&a, Rhs::Homogeneous).unwrap();
    let inst = reverse_reduce(&a, Projection::default()).unwrap();
    let x0 = inst.poly().to_bits(200);
    let cfg = SolverConfig::default().with_seed(1).with_forbid_zero(true);

    let mut group = c.benchmark_group("local_search_400x200");
    group.sample_size(20);
    group.bench_function("hill_climb", |b| b.iter(|| hill_climb(&system, black_box(&x0), &cfg).unwrap()));
    group.bench_function("simulated_anneal", |b| {
        b.iter(|| simulated_anneal(&system, black_box(&x0), &cfg).unwrap())
    });
    group.finish();
}

fn exhaustive(c: &mut Criterion) {
    let mut group = c.benchmark_group("exhaustive_solve");
    group.sample_size(10);
    for k in [12, 18, 22] {
        let a = gen_random_matrix(2 * k, k, 0.5, 11).unwrap();
        let system = AffineSystem::homogeneous(&a).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(k), &k, |b, _| {
            b.iter(|| system.exhaustive_solve(true).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, poly_mul, matvec, local_search, exhaustive);
criterion_main!(benches);
