use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use num_bigint::BigInt;
use qfa_core::analysis::{run_certified_realtime, run_exact_realtime, run_exact_unary, run_monte_carlo, McConfig};
use qfa_core::constructions::{aw_pal_input, ConstructionId};
use qfa_core::contextuality::{best_classical_win_probability, quantum_chi, ObservableGrid};
use qfa_core::exactnum::angle_probability;
use qfa_core::machines::{compile, CompiledMachine};
use qfa_core::{Rational, SymbolicAngle};

fn machine(id: ConstructionId) -> CompiledMachine {
    compile(&id.build().expect("builtin")).expect("compiles")
}

fn exact_runs(c: &mut Criterion) {
    let pal = machine(ConstructionId::AwPal);
    let mut g = c.benchmark_group("aw_pal_exact");
    for w in ["abcba", "abcabcab", "abcbaabcba"] {
        let tape = aw_pal_input(w);
        g.bench_with_input(BenchmarkId::from_parameter(w.len()), &tape, |b, t| {
            b.iter(|| run_exact_realtime(&pal, black_box(t)).unwrap())
        });
    }
    g.finish();

    let eq = machine(ConstructionId::AwEqPhase);
    c.bench_function("aw_eq_phase_certified", |b| {
        b.iter(|| run_certified_realtime(&eq, black_box("aaaabaaa"), 128).unwrap())
    });
}

fn monte_carlo(c: &mut Criterion) {
    let pal = machine(ConstructionId::AwPal);
    let tape = aw_pal_input("abcab");
    let cfg = McConfig::new(1_000, 7, 10_000);
    c.bench_function("aw_pal_mc_1000", |b| b.iter(|| run_monte_carlo(&pal, black_box(&tape), &cfg).unwrap()));
}

fn angles(c: &mut Criterion) {
    let mut g = c.benchmark_group("angle_probability");
    let a = SymbolicAngle::sqrt2_pi(Rational::frac(7, 1));
    for bits in [64u32, 256, 1024] {
        g.bench_with_input(BenchmarkId::from_parameter(bits), &bits, |b, &bits| {
            b.iter(|| angle_probability(black_box(&a), bits))
        });
    }
    g.finish();
}

fn unary(c: &mut Criterion) {
    let mcqfa = machine(ConstructionId::EvenoddMcqfa(16));
    let dfa = machine(ConstructionId::EvenoddDfa(10));
    let n = BigInt::from(3u32) << 100u32;
    c.bench_function("evenodd_mcqfa_unary", |b| b.iter(|| run_exact_unary(&mcqfa, black_box(&n)).unwrap()));
    c.bench_function("evenodd_dfa_unary", |b| b.iter(|| run_exact_unary(&dfa, black_box(&n)).unwrap()));
}

fn contextuality(c: &mut Criterion) {
    c.bench_function("grid_check", |b| b.iter(|| ObservableGrid::peres_mermin().check()));
    c.bench_function("quantum_chi", |b| b.iter(quantum_chi));
    c.bench_function("classical_tables", |b| b.iter(best_classical_win_probability));
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(20);
    targets = exact_runs, monte_carlo, angles, unary, contextuality
}
criterion_main!(benches);
