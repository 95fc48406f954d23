//! Hot-path kernels: Pauli application, the z-spectrum transform, and the
//! full stabilizer-entropy evaluation.

use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use magicbench_bench::random_state;
use magicbench_core::{magic, m2_fast, PauliString};

fn bench_apply_pauli(c: &mut Criterion) {
    let psi = random_state(12, 1);
    let p = PauliString::new(12, 0b1010_1010_1010, 0b0110_0110_0110).unwrap();
    c.bench_function("apply_pauli n=12", |b| {
        b.iter(|| black_box(p.apply(black_box(&psi)).unwrap()))
    });
}

fn bench_z_spectrum(c: &mut Criterion) {
    let psi = random_state(10, 2);
    c.bench_function("pauli_z_spectrum n=10", |b| {
        b.iter(|| black_box(magic::pauli_z_spectrum(black_box(&psi), 0b01_0110_1001).unwrap()))
    });
}

fn bench_m2_fast(c: &mut Criterion) {
    let mut group = c.benchmark_group("m2_fast");
    for n in [6usize, 8, 10] {
        let psi = random_state(n, n as u64);
        group.sample_size(if n >= 10 { 10 } else { 50 });
        group.bench_with_input(BenchmarkId::from_parameter(n), &psi, |b, psi| {
            b.iter(|| black_box(m2_fast(psi).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(kernels, bench_apply_pauli, bench_z_spectrum, bench_m2_fast);
criterion_main!(kernels);
