use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use qsensing_bench::{letter_object, mesh, spread_state};
use qsensing_core::dispersion::{delay_grid, hom_interferogram, Arms, DispersionProfile};
use qsensing_core::metrology::{run_monte_carlo, Protocol};
use qsensing_core::oam::{project_object, rotate_object};
use qsensing_core::BiphotonSpectrum;

fn interferometer(c: &mut Criterion) {
    let mut group = c.benchmark_group("interferometer");
    for photons in [2u32, 4, 6] {
        let state = spread_state(6, photons);
        let ifm = mesh(state.space().clone(), 6);
        group.bench_with_input(BenchmarkId::new("sequential", photons), &photons, |b, _| {
            b.iter(|| ifm.apply_sequential(black_box(&state)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("apply", photons), &photons, |b, _| {
            b.iter(|| ifm.apply(black_box(&state)).unwrap())
        });
    }
    group.finish();
}

fn monte_carlo(c: &mut Criterion) {
    let p = Protocol::Noon { n: 4 };
    c.bench_function("monte_carlo/noon4_100x1000", |b| {
        b.iter(|| run_monte_carlo(p, black_box(p.working_point()), 1000, 100, 7).unwrap())
    });
}

fn spiral(c: &mut Criterion) {
    let (object, basis) = letter_object();
    c.bench_function("spiral/project", |b| b.iter(|| project_object(black_box(&object), &basis).unwrap()));
    c.bench_function("spiral/rotate", |b| b.iter(|| rotate_object(black_box(&object), 0.37).unwrap()));
}

fn dispersion(c: &mut Criterion) {
    let spectrum = BiphotonSpectrum::gaussian(2.355e15, 1.0e13, 1024, 4.0).unwrap();
    let medium = DispersionProfile::new([0.0, 3.0e-15, 2.0e-26, 1.0e-40], 1.0).unwrap();
    let delays = delay_grid(1.0e-12, 201);
    c.bench_function("dispersion/hom_1024x201", |b| {
        b.iter(|| hom_interferogram(black_box(&spectrum), &Arms::signal_only(medium), &delays).unwrap())
    });
}

criterion_group!(benches, interferometer, monte_carlo, spiral, dispersion);
criterion_main!(benches);
