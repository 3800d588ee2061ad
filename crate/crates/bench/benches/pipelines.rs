//! Benchmarks for the hot paths: rewriting, equivalence checking, kinship
//! resolution, series codecs, and path invariance.

use criterion::{black_box, criterion_group, criterion_main, Criterion};
use obfuskit_core::kinship::{parse_chain, resolve_chain, tables, verify_entry, FamilyGraph};
use obfuskit_core::rewrite::obfuscate_premises;
use obfuskit_core::sample::random_problem;
use obfuskit_core::semantics::check_equivalence;
use obfuskit_core::series::{decode, encode_type3, SeriesInstance};
use obfuskit_core::spatial::{insert_detours, random_path, verify_invariance};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn bench_rewrite(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let problems: Vec<_> = (0..32).map(|_| random_problem(&mut rng)).collect();
    let mut i = 0;
    c.bench_function("obfuscate_premises min_rules=4", |b| {
        b.iter(|| {
            let p = &problems[i % problems.len()];
            i += 1;
            black_box(obfuscate_premises(p, i as u64, 4).unwrap())
        })
    });
}

fn bench_equivalence(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let base = random_problem(&mut rng);
    let (obf, _) = obfuscate_premises(&base, 42, 4).unwrap();
    c.bench_function("check_equivalence domains 1..=3", |b| {
        b.iter(|| black_box(check_equivalence(&base.premises[0], &obf.premises[0], 3).unwrap()))
    });
}

fn bench_kinship(c: &mut Criterion) {
    let chain = parse_chain("son of only son of my grandfather").unwrap();
    let context = FamilyGraph::new();
    c.bench_function("resolve_chain grandfather puzzle", |b| {
        b.iter(|| black_box(resolve_chain(&chain, &context).unwrap()))
    });

    let entry = &tables().l2[0];
    c.bench_function("verify_entry first L2 row", |b| {
        b.iter(|| black_box(verify_entry(entry)))
    });
}

fn bench_series(c: &mut Criterion) {
    let instance = SeriesInstance {
        terms: vec![3, 516, 4095, 9999, 0],
        hidden_index: None,
        answer: 12,
        pattern_note: "bench".to_string(),
    };
    c.bench_function("encode_type3 + decode round trip", |b| {
        b.iter(|| {
            let (surface, log) = encode_type3(&instance).unwrap();
            black_box(decode(&surface, &log).unwrap())
        })
    });
}

fn bench_spatial(c: &mut Criterion) {
    let base = random_path(3, 8, 9);
    c.bench_function("insert_detours + verify_invariance", |b| {
        let mut seed = 0u64;
        b.iter(|| {
            seed += 1;
            let longer = insert_detours(&base, 2, seed, 1..=9).unwrap();
            black_box(verify_invariance(&base, &longer))
        })
    });
}

criterion_group!(
    benches,
    bench_rewrite,
    bench_equivalence,
    bench_kinship,
    bench_series,
    bench_spatial
);
criterion_main!(benches);
