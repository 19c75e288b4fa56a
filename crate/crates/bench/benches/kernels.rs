use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use pvsym_core::classify::{canonicalize_1d, canonicalize_2d, Subalgebra};
use pvsym_core::liealg::{adjoint_matrix, adjoint_ode, adjoint_series_default};
use pvsym_core::pde::residual;
use pvsym_core::solver::{step, Field, Grid, SolverConfig};
use pvsym_core::{parse, AlgebraElement, PveParams};

fn symbolic(c: &mut Criterion) {
    let psi = parse("3*exp(x - t) + sin(2*x + y)*cos(t) + x^3*y").unwrap();
    let params = PveParams::new(1.5, 0.7);
    c.bench_function("pde residual", |b| b.iter(|| residual(black_box(&psi), &params)));
    c.bench_function("expr diff x3", |b| b.iter(|| black_box(&psi).diff("x").diff("y").diff("x")));
}

fn algebra(c: &mut Criterion) {
    let v = AlgebraElement([1.0, 0.3, -0.2, 0.5, 0.1, 0.7]);
    let w = AlgebraElement([0.0, 1.0, 0.4, 0.0, -1.0, 2.0]);
    c.bench_function("adjoint series", |b| b.iter(|| adjoint_series_default(black_box(&v), &w, 1.3)));
    c.bench_function("adjoint ode", |b| b.iter(|| adjoint_ode(black_box(&v), &w, 1.3)));
    c.bench_function("adjoint matrix", |b| b.iter(|| adjoint_matrix(black_box(&v), 1.3)));
    c.bench_function("canonicalize 1d", |b| b.iter(|| canonicalize_1d(black_box(&v))));
    let s = Subalgebra::two(AlgebraElement([0.0, 0.0, 1.0, 0.4, -0.3, 0.2]), AlgebraElement([0.0, 0.0, 0.0, 0.3, 1.0, -0.5]));
    c.bench_function("canonicalize 2d", |b| b.iter(|| canonicalize_2d(black_box(&s))));
}

fn solver(c: &mut Criterion) {
    for n in [32, 64, 128] {
        let grid = Grid::new(n, n).unwrap();
        let psi = Field::random_smooth(grid, 4, 1);
        let cfg = SolverConfig { f: 1.0, beta: 0.5, ..SolverConfig::default() };
        c.bench_function(&format!("rk4 step {n}x{n}"), |b| b.iter(|| step(black_box(&psi), &cfg)));
    }
}

criterion_group!(benches, symbolic, algebra, solver);
criterion_main!(benches);
