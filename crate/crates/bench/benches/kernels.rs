use std::f64::consts::TAU;
use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use dotphase::qpe::sample_readouts;
use dotphase::{exact_distribution, fit_pulse, run_circuit, GateMatrix, GateMode, QuantumState};

fn apply_gates(c: &mut Criterion) {
    let mut group = c.benchmark_group("apply");
    group.sample_size(20);
    let h = GateMatrix::hadamard();
    let cp = GateMatrix::controlled_phase(0.3);
    for n in [12usize, 16, 20] {
        let mut state = QuantumState::new(n, false).unwrap();
        group.bench_with_input(BenchmarkId::new("1q", n), &n, |b, &n| {
            b.iter(|| state.apply_1q(black_box(n / 2), &h).unwrap())
        });
        let mut state = QuantumState::new(n, false).unwrap();
        group.bench_with_input(BenchmarkId::new("2q", n), &n, |b, &n| {
            b.iter(|| state.apply_2q(black_box(1), black_box(n), &cp).unwrap())
        });
    }
    group.finish();
}

fn phase_estimation(c: &mut Criterion) {
    let mut group = c.benchmark_group("qpe");
    group.sample_size(20);
    for m in [8usize, 12, 16] {
        group.bench_with_input(BenchmarkId::new("exact_distribution", m), &m, |b, &m| {
            b.iter(|| exact_distribution(m, black_box(TAU * 0.3), GateMode::Ideal).unwrap())
        });
    }
    let state = run_circuit(12, TAU * 0.3, GateMode::Ideal, false).unwrap();
    group.bench_function("sample_10k_shots_m12", |b| {
        b.iter(|| sample_readouts(&state, 12, 10_000, black_box(7)))
    });
    group.finish();
}

fn pulse_fitting(c: &mut Criterion) {
    let mut group = c.benchmark_group("pulse");
    group.sample_size(10);
    group.bench_function("fit_hadamard", |b| {
        b.iter(|| fit_pulse(black_box(&GateMatrix::hadamard())))
    });
    group.finish();
}

criterion_group!(benches, apply_gates, phase_estimation, pulse_fitting);
criterion_main!(benches);
