use std::f64::consts::FRAC_PI_4;
use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qsl_core::evolution::default_t_max;
use qsl_core::harness::{random_hermitian, random_state, trial_rng};
use qsl_core::{evolve, first_passage, spectral_decompose};

fn evolution(c: &mut Criterion) {
    let mut group = c.benchmark_group("evolution");
    for dim in [2, 4, 8] {
        let mut rng = trial_rng(1, dim);
        let matrix = random_hermitian(dim, &mut rng);
        let system = spectral_decompose(matrix.clone()).unwrap();
        let state = random_state(dim, &mut rng).unwrap();
        let t_max = default_t_max(&system);

        group.bench_with_input(
            BenchmarkId::new("spectral_decompose", dim),
            &matrix,
            |b, m| b.iter(|| spectral_decompose(m.clone()).unwrap()),
        );
        group.bench_with_input(BenchmarkId::new("evolve", dim), &dim, |b, _| {
            b.iter(|| evolve(&system, &state, black_box(3.7)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("first_passage pi/4", dim), &dim, |b, _| {
            b.iter(|| first_passage(&system, &state, black_box(FRAC_PI_4), t_max))
        });
    }
    group.finish();
}

criterion_group!(benches, evolution);
criterion_main!(benches);
