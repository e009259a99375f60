//! Parallel against sequential inference generation and batch sweeps.
//!
//! Built without the `parallel` feature both variants run sequentially.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use gqe_core::engine::{saturate, Config};
use gqe_core::gen;
use gqe_core::parser::parse_problem;
use gqe_core::sweep;
use gqe_core::term::Clause;

const LOOP: &str = "clauses.
~a1(X,Y) | ~a2(Y,Z) | ~a3(Z,X) | bq(X,Y,b).
a3(X,f(X)) | ~g3(X).
a2(f(X),f(X)) | ~g2(X).
a1(f(X),X) | dd(g(X)) | ~g1(X).
~bq(X,Y,b).
~dd(X).
g1(f(a)).
g3(f(a)).
g2(a).
";

fn config(parallel: bool) -> Config {
    Config {
        parallel,
        ..Config::default()
    }
}

const VARIANTS: [(&str, bool); 2] = [("sequential", false), ("parallel", true)];

fn loop_set(c: &mut Criterion) {
    let p = parse_problem(LOOP).expect("loop set parses");
    let cs: Vec<Clause> = p.clauses().cloned().collect();
    let mut group = c.benchmark_group("loop_set");
    for (name, par) in VARIANTS {
        let cfg = config(par);
        group.bench_function(name, |b| b.iter(|| saturate(&p.sig, black_box(&cs), &cfg).unwrap()));
    }
    group.finish();
}

fn guarded_sets(c: &mut Criterion) {
    let inputs: Vec<_> = (0..16)
        .map(|i| {
            let mut rng = gen::rng(7 + i);
            let (sig, _, cs) = gen::guarded_clause_set(&mut rng);
            (sig, cs)
        })
        .collect();
    let mut group = c.benchmark_group("guarded_sets");
    for (name, par) in VARIANTS {
        let cfg = config(par);
        group.bench_function(name, |b| {
            b.iter(|| {
                for (sig, cs) in &inputs {
                    let _ = black_box(saturate(sig, cs, &cfg));
                }
            })
        });
    }
    group.finish();
}

fn sweeps(c: &mut Criterion) {
    let mut group = c.benchmark_group("sweeps");
    group.sample_size(10);
    for (name, par) in VARIANTS {
        let cfg = config(par);
        group.bench_with_input(BenchmarkId::new("oracle_agreement", name), &cfg, |b, cfg| {
            b.iter(|| sweep::oracle_agreement(black_box(60), 11, cfg))
        });
        group.bench_with_input(BenchmarkId::new("closure", name), &cfg, |b, cfg| {
            b.iter(|| sweep::closure(black_box(30), 11, cfg))
        });
        group.bench_with_input(BenchmarkId::new("gyo", name), &par, |b, &par| {
            b.iter(|| sweep::gyo_equivalence(black_box(200), 11, par))
        });
    }
    group.finish();
}

criterion_group!(benches, loop_set, guarded_sets, sweeps);
criterion_main!(benches);
