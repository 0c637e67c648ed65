//! Exact evolution against references that do not use the spectral decomposition.

use std::f64::consts::{FRAC_PI_4, PI};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use qsl_core::cases::hadamard_hamiltonian;
use qsl_core::harness::{random_hermitian, random_state, trial_rng};
use qsl_core::operators::{pauli_x, pauli_y, pauli_z};
use qsl_core::{angle, evolve, first_passage, overlap, spectral_decompose, QuantumState};

/// `e^{-iHt}` as the Taylor series truncated at `order`.
fn series_exponential(h: &DMatrix<Complex64>, t: f64, order: usize) -> DMatrix<Complex64> {
    let n = h.nrows();
    let step = h * Complex64::new(0.0, -t);
    let mut term = DMatrix::<Complex64>::identity(n, n);
    let mut sum = term.clone();
    for k in 1..=order {
        term = &term * &step / Complex64::new(k as f64, 0.0);
        sum += &term;
    }
    sum
}

#[test]
fn two_level_amplitude_matches_series_and_closed_form() {
    let (eps, d1, d2) = (0.3, 0.4, 0.3);
    let h = pauli_z() * Complex64::new(-eps, 0.0)
        + pauli_x() * Complex64::new(d1, 0.0)
        + pauli_y() * Complex64::new(d2, 0.0);
    let system = spectral_decompose(h.clone()).unwrap();
    let ground = QuantumState::basis(2, 0).unwrap();
    let omega = (eps * eps + d1 * d1 + d2 * d2).sqrt();
    let cos_beta = eps / omega;
    for k in 0..20 {
        let t = 0.25 * k as f64;
        let exact = evolve(&system, &ground, t).unwrap().amplitudes()[0];
        let series = series_exponential(&h, t, 30)[(0, 0)];
        let closed = Complex64::new((omega * t).cos(), cos_beta * (omega * t).sin());
        assert!(
            (exact - series).norm() < 1e-10,
            "t = {t}: {exact} vs series {series}"
        );
        assert!(
            (exact - closed).norm() < 1e-10,
            "t = {t}: {exact} vs closed form {closed}"
        );
    }
}

#[test]
fn random_six_level_reconstruction() {
    let mut rng = trial_rng(2024, 6);
    let h = random_hermitian(6, &mut rng);
    let system = spectral_decompose(h.clone()).unwrap();
    let v = system.eigenvectors();
    let lambda = DMatrix::from_diagonal(&system.eigenvalues().map(|e| Complex64::new(e, 0.0)));
    let rebuilt = v * lambda * v.adjoint();
    let worst = (rebuilt - &h).iter().map(|c| c.norm()).fold(0.0, f64::max);
    assert!(worst < 1e-10, "reconstruction error {worst}");
    let unitarity = (v.adjoint() * v - DMatrix::identity(6, 6))
        .iter()
        .map(|c| c.norm())
        .fold(0.0, f64::max);
    assert!(unitarity < 1e-10);
    let ev = system.eigenvalues();
    assert!(ev.iter().zip(ev.iter().skip(1)).all(|(a, b)| a <= b));
}

#[test]
fn random_propagation_matches_series() {
    let mut rng = trial_rng(11, 0);
    let h = random_hermitian(5, &mut rng);
    let system = spectral_decompose(h.clone()).unwrap();
    let state = random_state(5, &mut rng).unwrap();
    for t in [0.1, 0.7, 1.3] {
        // Split the interval so the truncated series converges to rounding.
        let pieces = 8;
        let step = series_exponential(&h, t / pieces as f64, 30);
        let mut reference: DVector<Complex64> = state.amplitudes().clone();
        for _ in 0..pieces {
            reference = &step * reference;
        }
        let exact = evolve(&system, &state, t).unwrap();
        let diff = (exact.amplitudes() - reference).norm();
        assert!(diff < 1e-11, "t = {t}: {diff}");
    }
}

#[test]
fn overlap_paths_agree() {
    let mut rng = trial_rng(5, 3);
    let system = spectral_decompose(random_hermitian(4, &mut rng)).unwrap();
    let state = random_state(4, &mut rng).unwrap();
    for k in 0..50 {
        let t = 0.37 * k as f64;
        let via_populations = overlap(&system, &state, t).unwrap();
        let via_state = state.inner(&evolve(&system, &state, t).unwrap()).unwrap();
        let s = Complex64::new(via_populations.s_real, via_populations.s_imag);
        assert!((s - via_state).norm() < 1e-12);
        assert!((via_populations.theta - s.norm().min(1.0).acos()).abs() < 1e-12);
    }
}

#[test]
fn saturating_pair_angle_is_time() {
    let system = spectral_decompose(qsl_core::operators::diagonal(&[0.0, 2.0])).unwrap();
    let state = QuantumState::equal_superposition(2, 0, 1, 0.0).unwrap();
    for k in 1..=20 {
        let t = PI / 2.0 * k as f64 / 20.0;
        let theta = overlap(&system, &state, t).unwrap().theta;
        assert!((theta - t).abs() < 1e-7, "t = {t}: theta = {theta}");
    }
    let t = first_passage(&system, &state, FRAC_PI_4, 10.0).unwrap();
    assert!((t - FRAC_PI_4).abs() < 1e-10);
}

/// Root of `|<0|psi(t)>|^2 = 1/2` from the closed-form amplitude, by bisection.
fn hadamard_root(eps: f64, delta: f64) -> f64 {
    let omega = eps.hypot(delta);
    let g = |t: f64| (omega * t).cos().powi(2) + (eps / omega * (omega * t).sin()).powi(2) - 0.5;
    let (mut lo, mut hi) = (0.0, PI / (2.0 * omega));
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn hadamard_first_passage_satisfies_tan_condition() {
    let (eps, delta) = (0.5, 1.0);
    let system = spectral_decompose(hadamard_hamiltonian(eps, delta, 0.0)).unwrap();
    let ground = QuantumState::basis(2, 0).unwrap();
    let plus = QuantumState::equal_superposition(2, 0, 1, 0.0).unwrap();
    let target = angle(&ground, &plus).unwrap().radians();
    let t = first_passage(&system, &ground, target, 20.0).unwrap();
    let omega = eps.hypot(delta);
    let rhs = ((delta * delta + eps * eps) / (delta * delta - eps * eps)).sqrt();
    assert!(((omega * t).tan() - rhs).abs() < 1e-8);
    assert!((t - hadamard_root(eps, delta)).abs() < 1e-8);
}
