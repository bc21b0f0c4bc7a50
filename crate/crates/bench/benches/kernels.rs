use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use graphlap::{
    distances_from, gauge_to_schrodinger, kernel_growth_probe, ray_completeness_diagnostic, run_exhaustion,
    solve_dirichlet, DirichletProblem, GraphFunction, LaplacianSpec, PathFamily,
};
use graphlap_bench::{grid, wave};

fn laplacian_apply(c: &mut Criterion) {
    let mut group = c.benchmark_group("laplacian_apply");
    for n in [32u64, 128] {
        let g = grid(n);
        let f = wave(&g);
        let l = LaplacianSpec::new(g);
        group.bench_with_input(BenchmarkId::from_parameter(n * n), &f, |b, f| b.iter(|| l.apply(black_box(f)).unwrap()));
    }
    group.finish();
}

fn dijkstra(c: &mut Criterion) {
    let mut group = c.benchmark_group("distances_from");
    for n in [32u64, 128] {
        let g = grid(n);
        group.bench_with_input(BenchmarkId::from_parameter(n * n), &g, |b, g| b.iter(|| distances_from(g, 0).unwrap()));
    }
    group.finish();
}

fn dirichlet(c: &mut Criterion) {
    let mut group = c.benchmark_group("dirichlet_solve");
    group.sample_size(20);
    // 20x20 takes the dense route, 40x40 the iterative one
    for n in [20u64, 40] {
        let g = grid(n);
        let h = gauge_to_schrodinger(&LaplacianSpec::new(g.clone())).unwrap();
        let region = g.region(g.vertices().filter(|&x| x % n < n - 1 && x / n < n - 1)).unwrap();
        let boundary = GraphFunction::constant_on(region.boundary.iter().copied(), 1.0);
        group.bench_function(BenchmarkId::from_parameter(n * n), |b| {
            b.iter(|| {
                solve_dirichlet(&DirichletProblem {
                    operator: &h,
                    region: &region,
                    boundary: &boundary,
                })
                .unwrap()
            })
        });
    }
    group.finish();
}

fn exhaustion(c: &mut Criterion) {
    let p = PathFamily::NegPotential.conjugate_operator(400).unwrap();
    c.bench_function("exhaustion_neg_potential_400", |b| {
        b.iter(|| run_exhaustion(&p, 1, 398, 1e-10, Some(vec![2, 10, 100])).unwrap())
    });
}

fn classifiers(c: &mut Criterion) {
    let mut group = c.benchmark_group("series");
    group.sample_size(10);
    group.bench_function("completeness_nlogn_1e6", |b| {
        b.iter(|| ray_completeness_diagnostic(&PathFamily::NLogN, 1_000_000).unwrap())
    });
    group.bench_function("kernel_growth_constant_1e4", |b| {
        b.iter(|| kernel_growth_probe(&PathFamily::Constant { omega: 1.0, cond: 1.0 }, Some(1.0), 10_000).unwrap())
    });
    group.finish();
}

criterion_group!(benches, laplacian_apply, dijkstra, dirichlet, exhaustion, classifiers);
criterion_main!(benches);
