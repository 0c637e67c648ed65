//! Small dense operators used by the gate case studies and tests.

use nalgebra::DMatrix;
use num_complex::Complex64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn identity(n: usize) -> DMatrix<Complex64> {
    DMatrix::identity(n, n)
}

pub fn pauli_x() -> DMatrix<Complex64> {
    DMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
}

pub fn pauli_y() -> DMatrix<Complex64> {
    DMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO])
}

pub fn pauli_z() -> DMatrix<Complex64> {
    DMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE])
}

/// Walsh-Hadamard gate.
pub fn hadamard() -> DMatrix<Complex64> {
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    DMatrix::from_row_slice(2, 2, &[h, h, h, -h])
}

/// CNOT with the first (most significant) qubit as control.
pub fn cnot() -> DMatrix<Complex64> {
    let mut m = DMatrix::zeros(4, 4);
    m[(0, 0)] = ONE;
    m[(1, 1)] = ONE;
    m[(2, 3)] = ONE;
    m[(3, 2)] = ONE;
    m
}

pub fn diagonal(values: &[f64]) -> DMatrix<Complex64> {
    DMatrix::from_fn(values.len(), values.len(), |i, j| {
        if i == j {
            Complex64::new(values[i], 0.0)
        } else {
            ZERO
        }
    })
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    DMatrix::from_fn(ar * br, ac * bc, |i, j| {
        a[(i / br, j / bc)] * b[(i % br, j % bc)]
    })
}

/// Fidelity `|tr(U^dagger V)| / n` of two n×n unitaries; 1 iff equal up to global phase.
pub fn phase_insensitive_fidelity(u: &DMatrix<Complex64>, v: &DMatrix<Complex64>) -> f64 {
    let n = u.nrows() as f64;
    (u.adjoint() * v).trace().norm() / n
}

/// Largest entrywise distance between `u` and `e^{i gamma} v`, with the
/// global phase `gamma` chosen from `tr(v^dagger u)`.
pub fn distance_up_to_global_phase(u: &DMatrix<Complex64>, v: &DMatrix<Complex64>) -> f64 {
    let overlap = (v.adjoint() * u).trace();
    let phase = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        ONE
    };
    (u - v * phase).iter().map(|c| c.norm()).fold(0.0, f64::max)
}
