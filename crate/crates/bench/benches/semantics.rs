use cerl_bench::{countdown, fan_in};
use cerl_core::seq::FrameStack;
use cerl_core::{
    corpus, explore, parse_expr, print_expr, random_run, seq_eval, weakly_bisimilar, ExplorationConfig,
};
use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

fn sequential(c: &mut Criterion) {
    let mm = corpus::mm_program();
    c.bench_function("seq_eval mm", |b| {
        b.iter(|| seq_eval(FrameStack::new(), black_box(mm.clone()), 10_000))
    });
    let mut group = c.benchmark_group("seq_eval countdown");
    for n in [10u64, 100, 1000] {
        let e = countdown(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &e, |b, e| {
            b.iter(|| seq_eval(FrameStack::new(), e.clone(), 1_000_000))
        });
    }
    group.finish();
}

fn surface(c: &mut Criterion) {
    let src = print_expr(&corpus::mm_program());
    c.bench_function("parse mm", |b| b.iter(|| parse_expr(black_box(&src))));
}

fn exploration(c: &mut Criterion) {
    let cfg = ExplorationConfig::depth(40);
    c.bench_function("explore signal_order", |b| {
        let n = corpus::signal_order_node();
        b.iter(|| explore(&n, &cfg))
    });
    let mut group = c.benchmark_group("explore fan_in");
    group.sample_size(10);
    for k in [2u64, 3, 4] {
        let n = fan_in(k);
        group.bench_with_input(BenchmarkId::from_parameter(k), &n, |b, n| {
            b.iter(|| explore(n, &ExplorationConfig::default()))
        });
    }
    group.finish();
    c.bench_function("random_run signal_order", |b| {
        let n = corpus::signal_order_node();
        let mut seed = 0u64;
        b.iter(|| {
            seed += 1;
            random_run(&n, seed, 500)
        })
    });
}

fn equivalence(c: &mut Criterion) {
    let cfg = ExplorationConfig::default();
    let (a, b2) = (corpus::mm_node(), corpus::mm_result_node());
    c.bench_function("weakly_bisimilar mm", |b| b.iter(|| weakly_bisimilar(&a, &b2, &cfg)));
}

criterion_group!(benches, sequential, surface, exploration, equivalence);
criterion_main!(benches);
