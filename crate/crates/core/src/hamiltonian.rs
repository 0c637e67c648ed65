//! Hermitian Hamiltonians, their spectral decomposition, and energy statistics.
//!
//! Everything is in natural units with hbar = 1, so energies are angular
//! frequencies and times are in inverse energy units.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{QslError, Result};
use crate::state::QuantumState;

/// Entrywise tolerance on `|H - H^dagger|`.
pub const HERMITIAN_TOLERANCE: f64 = 1e-10;

/// A Hermitian matrix together with its eigendecomposition.
///
/// Eigenvalues are ascending and the columns of `eigenvectors` are the
/// matching orthonormal eigenstates.
#[derive(Debug, Clone)]
pub struct HamiltonianSystem {
    matrix: DMatrix<Complex64>,
    eigenvalues: DVector<f64>,
    eigenvectors: DMatrix<Complex64>,
}

/// Diagonalizes a Hermitian matrix.
pub fn spectral_decompose(matrix: DMatrix<Complex64>) -> Result<HamiltonianSystem> {
    let (rows, cols) = matrix.shape();
    if rows != cols {
        return Err(QslError::NotSquare { rows, cols });
    }
    if rows < 2 {
        return Err(QslError::InvalidDimension(rows));
    }
    let mut worst = (0, 0, 0.0f64);
    for i in 0..rows {
        for j in i..cols {
            let deviation = (matrix[(i, j)] - matrix[(j, i)].conj()).norm();
            if !(deviation <= worst.2) {
                worst = (i, j, deviation);
            }
        }
    }
    if !(worst.2 <= HERMITIAN_TOLERANCE) {
        return Err(QslError::NotHermitian {
            row: worst.0,
            col: worst.1,
            deviation: worst.2,
        });
    }

    let symmetric = (&matrix + matrix.adjoint()).unscale(2.0);
    let eigen = symmetric.symmetric_eigen();
    let mut order: Vec<usize> = (0..rows).collect();
    order.sort_by(|&a, &b| eigen.eigenvalues[a].total_cmp(&eigen.eigenvalues[b]));

    let eigenvalues = DVector::from_iterator(rows, order.iter().map(|&k| eigen.eigenvalues[k]));
    let eigenvectors = DMatrix::from_fn(rows, rows, |i, j| eigen.eigenvectors[(i, order[j])]);

    Ok(HamiltonianSystem {
        matrix,
        eigenvalues,
        eigenvectors,
    })
}

impl HamiltonianSystem {
    pub fn dimension(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &DMatrix<Complex64> {
        &self.eigenvectors
    }

    pub fn e_min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn e_max(&self) -> f64 {
        self.eigenvalues[self.dimension() - 1]
    }

    /// Eigenstate number `k` (ascending energy order).
    pub fn eigenstate(&self, k: usize) -> QuantumState {
        QuantumState::from_unitary_image(self.eigenvectors.column(k).into_owned())
    }

    pub(crate) fn check_state(&self, state: &QuantumState) -> Result<()> {
        if state.dimension() != self.dimension() {
            return Err(QslError::DimensionMismatch {
                expected: self.dimension(),
                found: state.dimension(),
            });
        }
        Ok(())
    }

    /// Expansion coefficients `c_n = <psi_n|psi>` in the eigenbasis.
    pub fn coefficients(&self, state: &QuantumState) -> Result<DVector<Complex64>> {
        self.check_state(state)?;
        Ok(self.eigenvectors.ad_mul(state.amplitudes()))
    }

    /// Populations `|c_n|^2` in the eigenbasis.
    pub fn populations(&self, state: &QuantumState) -> Result<DVector<f64>> {
        Ok(self.coefficients(state)?.map(|c| c.norm_sqr()))
    }

    /// Smallest nonzero gap between distinct eigenvalues, if any.
    pub fn smallest_gap(&self) -> Option<f64> {
        let scale = 1.0 + self.e_min().abs().max(self.e_max().abs());
        self.eigenvalues
            .as_slice()
            .windows(2)
            .map(|w| w[1] - w[0])
            .filter(|&g| g > 1e-12 * scale)
            .min_by(f64::total_cmp)
    }

    /// Largest entrywise deviation of `V diag(E) V^dagger` from the input matrix.
    pub fn reconstruction_error(&self) -> f64 {
        let diag = DMatrix::from_diagonal(&self.eigenvalues.map(|e| Complex64::new(e, 0.0)));
        let rebuilt = &self.eigenvectors * diag * self.eigenvectors.adjoint();
        (rebuilt - &self.matrix)
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }

    /// Largest entrywise deviation of `V^dagger V` from the identity.
    pub fn unitarity_error(&self) -> f64 {
        let n = self.dimension();
        let gram = self.eigenvectors.ad_mul(&self.eigenvectors);
        (gram - DMatrix::<Complex64>::identity(n, n))
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }
}

/// Energy moments of a state together with the spectral range of its Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyStats {
    pub mean: f64,
    pub spread: f64,
    pub e_min: f64,
    /// May be `+inf` when only a lower spectral bound is known.
    pub e_max: f64,
    pub half_width: f64,
}

impl EnergyStats {
    /// Builds statistics from given moments, e.g. from the command line.
    pub fn new(mean: f64, spread: f64, e_min: f64, e_max: f64) -> Result<Self> {
        let finite = mean.is_finite() && spread.is_finite() && e_min.is_finite();
        if !finite || e_max.is_nan() {
            return Err(QslError::InvalidArgument(
                "energy statistics must be finite numbers".into(),
            ));
        }
        if spread < 0.0 {
            return Err(QslError::InvalidArgument(format!(
                "spread must be nonnegative, got {spread}"
            )));
        }
        let slack = 1e-12 * (1.0 + mean.abs());
        if mean < e_min - slack || mean > e_max + slack {
            return Err(QslError::InvalidArgument(format!(
                "mean {mean} must lie within [e_min, e_max] = [{e_min}, {e_max}]"
            )));
        }
        let half_width = (e_max - e_min) / 2.0;
        if spread > half_width * (1.0 + 1e-12) + slack {
            return Err(QslError::InvalidArgument(format!(
                "spread {spread} exceeds the spectral half-width {half_width}"
            )));
        }
        Ok(Self {
            mean,
            spread,
            e_min,
            e_max,
            half_width,
        })
    }

    /// Scale used for "numerically zero" decisions on energies.
    fn energy_scale(&self) -> f64 {
        let upper = if self.e_max.is_finite() {
            self.e_max.abs()
        } else {
            0.0
        };
        1.0 + self.mean.abs().max(self.e_min.abs()).max(upper)
    }

    /// True when the state is (numerically) an eigenstate and never evolves.
    pub fn is_stationary(&self) -> bool {
        self.spread <= 1e-12 * self.energy_scale()
    }

    pub fn has_upper_bound(&self) -> bool {
        self.e_max.is_finite()
    }
}

/// Mean energy, spread and spectral range of `state` under `system`.
pub fn energy_stats(state: &QuantumState, system: &HamiltonianSystem) -> Result<EnergyStats> {
    system.check_state(state)?;
    let psi = state.amplitudes();
    let h_psi = system.matrix() * psi;
    let mean = psi.dotc(&h_psi).re;
    // |(H - mean) psi| avoids the cancellation in <H^2> - mean^2.
    let spread = (h_psi - psi.scale(mean)).norm();
    let (e_min, e_max) = (system.e_min(), system.e_max());
    Ok(EnergyStats {
        mean: mean.clamp(e_min, e_max),
        spread,
        e_min,
        e_max,
        half_width: (e_max - e_min) / 2.0,
    })
}
