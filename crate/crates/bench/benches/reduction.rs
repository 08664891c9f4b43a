use std::hint::black_box;

use binet::rho::nat_rules;
use binet::{
    collect, compile_rho, corpus, iso, parse_binet, parse_rho, print_binet, reduce, rho_rules,
    Limits, Strategy,
};
use binet_bench::{addition, erasures, identities};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn golden(c: &mut Criterion) {
    let net = compile_rho(&parse_rho(corpus::FIGURE1_RHO).unwrap()).unwrap();
    let rs = rho_rules();
    c.bench_function("figure1/deterministic", |b| {
        b.iter(|| {
            reduce(
                black_box(&net),
                &rs,
                Strategy::deterministic(),
                Limits::default(),
            )
            .unwrap()
        })
    });
}

fn strategies(c: &mut Criterion) {
    let net = addition(30, 30);
    let rs = nat_rules();
    let mut g = c.benchmark_group("add_30_30");
    for s in [
        Strategy::deterministic(),
        Strategy::weighted(),
        Strategy::stochastic(1),
    ] {
        g.bench_function(s.name(), |b| {
            b.iter(|| reduce(black_box(&net), &rs, s, Limits::default()).unwrap())
        });
    }
    g.finish();
}

fn parallel_pass(c: &mut Criterion) {
    let rs = nat_rules();
    let mut g = c.benchmark_group("erasures");
    for n in [16, 128, 1024] {
        let net = erasures(n);
        g.bench_with_input(BenchmarkId::from_parameter(n), &net, |b, net| {
            b.iter(|| reduce(net, &rs, Strategy::deterministic(), Limits::default()).unwrap())
        });
    }
    g.finish();
}

fn rho_chain(c: &mut Criterion) {
    let rs = rho_rules();
    let mut g = c.benchmark_group("identities");
    for n in [4, 16, 64] {
        let net = compile_rho(&parse_rho(&identities(n)).unwrap()).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(n), &net, |b, net| {
            b.iter(|| reduce(net, &rs, Strategy::deterministic(), Limits::default()).unwrap())
        });
    }
    g.finish();
}

fn phases(c: &mut Criterion) {
    let net = erasures(256);
    let rs = nat_rules();
    c.bench_function("collect/erasures_256", |b| {
        b.iter(|| collect(black_box(&net), &rs))
    });
    let text = print_binet(&net);
    c.bench_function("parse/erasures_256", |b| {
        b.iter(|| parse_binet(black_box(&text)).unwrap())
    });
    let other = parse_binet(&text).unwrap();
    c.bench_function("iso/erasures_256", |b| {
        b.iter(|| iso(black_box(&net), &other))
    });
}

criterion_group!(
    benches,
    golden,
    strategies,
    parallel_pass,
    rho_chain,
    phases
);
criterion_main!(benches);
