use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use polref::stack::{solve_star, solve_transfer};
use polref::{exact_stack_solve, helix_solve_analytic, helix_solve_sliced, run_vessel, two_layer_r_approx, two_layer_t_approx};
use polref_bench::{crossed_films, helix, helix_table, k_grid, twisted_stack};

fn two_layer_scan(c: &mut Criterion) {
    let (a, b) = crossed_films();
    let ks = k_grid(0.02, 0.3, 256);
    c.bench_function("two_layer_approx/256k", |bench| {
        bench.iter(|| {
            for &k in &ks {
                black_box(two_layer_t_approx(k, &a, &b));
                black_box(two_layer_r_approx(k, &a, &b));
            }
        })
    });
}

fn exact_stack(c: &mut Criterion) {
    let mut group = c.benchmark_group("exact_stack");
    for n in [2, 16, 128] {
        let stack = twisted_stack(n);
        group.bench_with_input(BenchmarkId::new("auto", n), &stack, |bench, s| {
            bench.iter(|| exact_stack_solve(black_box(0.15), s).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("transfer", n), &stack, |bench, s| {
            bench.iter(|| solve_transfer(black_box(0.15), s).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("star", n), &stack, |bench, s| {
            bench.iter(|| solve_star(black_box(0.15), s).unwrap())
        });
    }
    group.finish();
}

fn helix_methods(c: &mut Criterion) {
    let m = helix();
    let mut group = c.benchmark_group("helix");
    group.bench_function("analytic", |bench| bench.iter(|| helix_solve_analytic(black_box(0.2132), &m).unwrap()));
    for n in [256, 4096] {
        group.bench_with_input(BenchmarkId::new("sliced", n), &n, |bench, &n| {
            bench.iter(|| helix_solve_sliced(black_box(0.2132), &m, n).unwrap())
        });
    }
    group.finish();
}

fn vessel(c: &mut Criterion) {
    let table = helix_table();
    let mut group = c.benchmark_group("vessel");
    group.sample_size(10);
    group.bench_function("helix_table/10k_x_1k", |bench| bench.iter(|| run_vessel(&table, 10_000, 1000, 1).unwrap()));
    group.finish();
}

criterion_group!(benches, two_layer_scan, exact_stack, helix_methods, vessel);
criterion_main!(benches);
