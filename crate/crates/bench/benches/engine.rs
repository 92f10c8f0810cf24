use criterion::{criterion_group, criterion_main, Criterion};
use poq_core::harness::run_trials;
use poq_core::markov::{analyze, testbed};
use poq_core::protocols::clock::make_clock;
use poq_core::protocols::{min_f1, ProtocolId, ProtocolParams, ProverChoice};
use poq_core::{machines::run_machine, pad, trial_rng, Rational};
use std::hint::black_box;

fn supersafe(c: &mut Criterion) {
    let params = ProtocolParams::supersafe(Rational::new(1, 4), 33);
    c.bench_function("supersafe honest |w|=10, 100 trials", |b| {
        b.iter(|| run_trials(ProtocolId::SupersafeEq, black_box("ababababab"), &ProverChoice::Honest, &params, 100, 1).unwrap())
    });
}

fn padded(c: &mut Criterion) {
    let params = ProtocolParams::padded();
    let input = pad("abba").unwrap().render();
    c.bench_function("padded-pal quantum core=abba, 10 trials", |b| {
        b.iter(|| run_trials(ProtocolId::PaddedPal, black_box(&input), &ProverChoice::Honest, &params, 10, 1).unwrap())
    });
}

fn clock(c: &mut Criterion) {
    let spec = make_clock(1, 1, 0.02).unwrap();
    let w = "a".repeat(16);
    let mut t = 0;
    c.bench_function("clock t=1 run on n=16", |b| {
        b.iter(|| {
            t += 1;
            run_machine(&spec.machine, black_box(&w), &mut trial_rng(5, t), u64::MAX).unwrap()
        })
    });
}

fn analysis(c: &mut Criterion) {
    let p = Rational::new(1, 3);
    c.bench_function("min_f1 p=1/3 m=19", |b| b.iter(|| min_f1(black_box(&p), 19, 21).unwrap()));
    let m = testbed::gambler();
    c.bench_function("chain analysis gambler ab|ab", |b| b.iter(|| analyze(&m, black_box("ab"), "ab", 1).unwrap()));
}

criterion_group!(benches, supersafe, padded, clock, analysis);
criterion_main!(benches);
