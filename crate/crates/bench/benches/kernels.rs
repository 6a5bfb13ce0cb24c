use criterion::{criterion_group, criterion_main, Criterion};
use mechprep::engine::{apply_measurement, thermal_state, DEFAULT_N_MAX};
use mechprep::targets::{render_target, TargetSpec};
use mechprep::{realize_operator, synthesize_pulse, wigner, BasisTransform, PositionGrid, Pulse, SynthesisConfig};
use std::hint::black_box;

fn kernels(c: &mut Criterion) {
    let grid = PositionGrid::default();
    let target = render_target(&TargetSpec::Fock { n: 3 }, &grid).unwrap();
    let cfg = SynthesisConfig::default();

    c.bench_function("synthesize_pulse fock3", |b| {
        b.iter(|| synthesize_pulse(black_box(&target), 2.0, 1.0, &cfg).unwrap())
    });

    let pulse = synthesize_pulse(&target, 2.0, 1.0, &cfg).unwrap();
    c.bench_function("realize_operator fock3", |b| {
        b.iter(|| realize_operator(black_box(&pulse), &grid, 1.0).unwrap())
    });

    let tophat = Pulse::top_hat(1.0, 64).unwrap();
    c.bench_function("realize_operator tophat", |b| {
        b.iter(|| realize_operator(black_box(&tophat), &grid, 1.0).unwrap())
    });

    let state_grid = PositionGrid::state_default();
    let basis = BasisTransform::new(state_grid, DEFAULT_N_MAX).unwrap();
    let rho = thermal_state(5.0, DEFAULT_N_MAX).unwrap();
    let ups = render_target(&TargetSpec::Gaussian { s: 4.0 }, &state_grid).unwrap();
    c.bench_function("apply_measurement n80", |b| {
        b.iter(|| apply_measurement(black_box(&rho), &ups, &basis).unwrap())
    });

    let axis = PositionGrid::phase_space_default();
    c.bench_function("wigner thermal 161x161", |b| b.iter(|| wigner(black_box(&rho), &axis, &axis).unwrap()));
}

criterion_group!(benches, kernels);
criterion_main!(benches);
