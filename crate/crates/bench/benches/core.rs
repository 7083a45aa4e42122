use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use pelam_core::distribution::{estimate_hnv, hnv_lower_bound, nf_mass};
use pelam_core::fixtures;
use pelam_core::proof::{normalize, verify_simulation};
use pelam_core::rewrite::{pnf, pnf_fast, Mode};
use pelam_core::{check_derivation, measure, parse_formula, parse_term};

fn boolean(c: &mut Criterion) {
    let small = parse_formula("a.0 & b.0").unwrap();
    let wide = parse_formula("(a.0 | b.1) & (c.0 | !a.1) & (d.0 | e.1 | !c.1) & (f.0 | !g.0) & (h.1 | a.2)").unwrap();
    c.bench_function("measure/two_atoms", |b| b.iter(|| measure(black_box(&small))));
    c.bench_function("measure/eleven_atoms", |b| b.iter(|| measure(black_box(&wide))));
}

fn rewriting(c: &mut Criterion) {
    let t = parse_term("(\\x. x (+a.0) (x (+b.1) x)) ((\\y. y) (+a.1) ((\\z. z) (+b.0) (\\w. w)))").unwrap();
    c.bench_function("pnf/traced", |b| b.iter(|| pnf(black_box(&t), Mode::Pe)));
    c.bench_function("pnf/fast", |b| b.iter(|| pnf_fast(black_box(&t), Mode::Pe)));
}

fn termination(c: &mut Criterion) {
    let t = fixtures::two_generator_term();
    c.bench_function("hnv_lower_bound/two_generators", |b| b.iter(|| hnv_lower_bound(black_box(&t), Mode::Pe, 200)));
    c.bench_function("nf_mass/two_generators", |b| b.iter(|| nf_mass(black_box(&t), 200)));
    let fair = fixtures::fair_identity();
    c.bench_function("estimate_hnv/1000_samples", |b| {
        b.iter(|| estimate_hnv(black_box(&fair), Mode::Pe, 1000, 100, 1))
    });
}

fn typing(c: &mut Criterion) {
    let all = fixtures::typed_fixtures();
    c.bench_function("check_derivation/all_fixtures", |b| {
        b.iter(|| {
            for fx in &all {
                check_derivation(black_box(&fx.derivation), fx.system).unwrap();
            }
        })
    });
}

fn proofs(c: &mut Criterion) {
    let cut = fixtures::twice_half_cut();
    c.bench_function("normalize/twice_half_cut", |b| b.iter(|| normalize(black_box(&cut), 1000)));
    c.bench_function("verify_simulation/twice_half_cut", |b| b.iter(|| verify_simulation(black_box(&cut), 1000)));
}

criterion_group!(benches, boolean, rewriting, termination, typing, proofs);
criterion_main!(benches);
