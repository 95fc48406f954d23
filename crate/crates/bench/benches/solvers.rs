//! Solver-level costs: exact diagonalization, one DMRG run, one VMC
//! estimator epoch, and one circuit application.

use criterion::{black_box, criterion_group, criterion_main, Criterion};

use magicbench_bench::{random_rbm, random_state};
use magicbench_core::nqs::{self, AmplitudeKind, EstimatorInput, SamplerConfig};
use magicbench_core::{
    apply_ansatz, build_tfim_mpo, dmrg_ground_state, ground_state_ed, AnsatzConfig,
    CircuitParameters, DmrgConfig, TfimModel,
};

fn bench_ed(c: &mut Criterion) {
    let model = TfimModel::periodic_ferromagnet(8, 1.0).unwrap();
    let mut group = c.benchmark_group("exact");
    group.sample_size(20);
    group.bench_function("ground_state_ed n=8", |b| {
        b.iter(|| black_box(ground_state_ed(black_box(&model)).unwrap()))
    });
    group.finish();
}

fn bench_dmrg(c: &mut Criterion) {
    let model = TfimModel::periodic_ferromagnet(8, 1.0).unwrap();
    let mpo = build_tfim_mpo(&model);
    let config = DmrgConfig::new(16, 3);
    let mut group = c.benchmark_group("dmrg");
    group.sample_size(20);
    group.bench_function("ground_state n=8 D=16", |b| {
        b.iter(|| black_box(dmrg_ground_state(black_box(&mpo), &config).unwrap()))
    });
    group.finish();
}

fn bench_vmc_epoch(c: &mut Criterion) {
    let model = TfimModel::periodic_ferromagnet(8, 1.0).unwrap();
    let terms = model.terms();
    let params = random_rbm(8, 1, 7);
    let sampler = SamplerConfig::new(1000, 8, 100, 5).unwrap();
    let mut group = c.benchmark_group("vmc");
    group.sample_size(20);
    group.bench_function("sample 1000 n=8", |b| {
        b.iter(|| {
            black_box(nqs::sample(&params, &sampler, AmplitudeKind::Conventional).unwrap())
        })
    });
    let samples = nqs::sample(&params, &sampler, AmplitudeKind::Conventional).unwrap();
    group.bench_function("energy_and_gradient 1000 samples n=8", |b| {
        b.iter(|| {
            black_box(
                nqs::energy_and_gradient(
                    &params,
                    &terms,
                    EstimatorInput::Samples(&samples),
                    AmplitudeKind::Conventional,
                )
                .unwrap(),
            )
        })
    });
    group.finish();
}

fn bench_ansatz(c: &mut Criterion) {
    let config = AnsatzConfig::benchmark(8).unwrap();
    let params = CircuitParameters::zeros(&config);
    let psi = random_state(8, 11);
    c.bench_function("apply_ansatz n=8 4 layers", |b| {
        b.iter(|| black_box(apply_ansatz(&config, &params, black_box(&psi)).unwrap()))
    });
}

criterion_group!(solvers, bench_ed, bench_dmrg, bench_vmc_epoch, bench_ansatz);
criterion_main!(solvers);
