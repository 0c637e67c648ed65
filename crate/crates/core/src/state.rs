//! Pure states and the evolution angle between them.

use std::f64::consts::FRAC_PI_2;

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{QslError, Result};

/// Tolerance on `|sum |c_i|^2 - 1|` accepted by [`QuantumState::new`].
pub const NORM_TOLERANCE: f64 = 1e-12;

/// A normalized pure state over an orthonormal basis.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    amplitudes: DVector<Complex64>,
}

impl QuantumState {
    /// Wraps amplitudes that are already normalized.
    pub fn new(amplitudes: impl Into<DVector<Complex64>>) -> Result<Self> {
        let amplitudes = amplitudes.into();
        check_dimension(amplitudes.len())?;
        let norm_sqr = amplitudes.norm_squared();
        if !((norm_sqr - 1.0).abs() <= NORM_TOLERANCE) {
            return Err(QslError::NotNormalized(norm_sqr));
        }
        Ok(Self { amplitudes })
    }

    /// Rescales arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(amplitudes: impl Into<DVector<Complex64>>) -> Result<Self> {
        let amplitudes = amplitudes.into();
        check_dimension(amplitudes.len())?;
        let norm = amplitudes.norm();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(QslError::NotNormalized(norm * norm));
        }
        Ok(Self {
            amplitudes: amplitudes.unscale(norm),
        })
    }

    /// Computational basis state `|index>`.
    pub fn basis(dimension: usize, index: usize) -> Result<Self> {
        check_dimension(dimension)?;
        if index >= dimension {
            return Err(QslError::InvalidArgument(format!(
                "basis index {index} out of range for dimension {dimension}"
            )));
        }
        let mut amplitudes = DVector::zeros(dimension);
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(Self { amplitudes })
    }

    /// Equal-weight superposition `(|i> + e^{i phase} |j>) / sqrt(2)`.
    pub fn equal_superposition(dimension: usize, i: usize, j: usize, phase: f64) -> Result<Self> {
        if i == j || i >= dimension || j >= dimension {
            return Err(QslError::InvalidArgument(format!(
                "superposition needs two distinct indices below {dimension}, got {i} and {j}"
            )));
        }
        check_dimension(dimension)?;
        let mut amplitudes = DVector::zeros(dimension);
        amplitudes[i] = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        amplitudes[j] = Complex64::from_polar(std::f64::consts::FRAC_1_SQRT_2, phase);
        Ok(Self { amplitudes })
    }

    /// Skips the normalization check. Only for results of unitary maps.
    pub(crate) fn from_unitary_image(amplitudes: DVector<Complex64>) -> Self {
        debug_assert!((amplitudes.norm_squared() - 1.0).abs() < 1e-9);
        Self { amplitudes }
    }

    pub fn dimension(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> DVector<Complex64> {
        self.amplitudes
    }

    pub fn norm_squared(&self) -> f64 {
        self.amplitudes.norm_squared()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &QuantumState) -> Result<Complex64> {
        if self.dimension() != other.dimension() {
            return Err(QslError::DimensionMismatch {
                expected: self.dimension(),
                found: other.dimension(),
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .fold(Complex64::new(0.0, 0.0), |acc, (a, b)| acc + a.conj() * b))
    }

    /// Multiplies every amplitude by `e^{i phase}`.
    pub fn with_global_phase(&self, phase: f64) -> Self {
        let factor = Complex64::from_polar(1.0, phase);
        Self {
            amplitudes: self.amplitudes.map(|c| c * factor),
        }
    }

    /// Tensor product `self ⊗ other`, with `self` as the most significant factor.
    pub fn tensor(&self, other: &QuantumState) -> QuantumState {
        let (m, n) = (self.dimension(), other.dimension());
        let amplitudes = DVector::from_fn(m * n, |k, _| {
            self.amplitudes[k / n] * other.amplitudes[k % n]
        });
        Self { amplitudes }
    }
}

fn check_dimension(dimension: usize) -> Result<()> {
    if dimension < 2 {
        return Err(QslError::InvalidDimension(dimension));
    }
    Ok(())
}

/// An evolution angle in `[0, pi/2]`, defined by `cos(theta) = |<a|b>|`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Angle(f64);

impl Angle {
    pub const ZERO: Angle = Angle(0.0);
    pub const RIGHT: Angle = Angle(FRAC_PI_2);

    pub fn new(theta: f64) -> Result<Self> {
        if !(0.0..=FRAC_PI_2).contains(&theta) {
            return Err(QslError::theta_range(theta));
        }
        Ok(Angle(theta))
    }

    /// Angle whose cosine is the given overlap magnitude; rounding above 1 is clamped.
    pub fn from_overlap_magnitude(magnitude: f64) -> Angle {
        Angle(magnitude.clamp(0.0, 1.0).acos())
    }

    pub fn radians(self) -> f64 {
        self.0
    }

    pub fn cos(self) -> f64 {
        self.0.cos()
    }
}

/// Angle between two pure states.
pub fn angle(a: &QuantumState, b: &QuantumState) -> Result<Angle> {
    Ok(Angle::from_overlap_magnitude(a.inner(b)?.norm()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rejects_unnormalized_and_small() {
        assert!(matches!(
            QuantumState::new(DVector::from_vec(vec![c(1.0, 0.0), c(1.0, 0.0)])),
            Err(QslError::NotNormalized(_))
        ));
        assert!(matches!(
            QuantumState::new(DVector::from_vec(vec![c(1.0, 0.0)])),
            Err(QslError::InvalidDimension(1))
        ));
        assert!(
            QuantumState::normalized(DVector::from_vec(vec![c(0.0, 0.0), c(0.0, 0.0)])).is_err()
        );
    }

    #[test]
    fn normalizes() {
        let s =
            QuantumState::normalized(DVector::from_vec(vec![c(3.0, 0.0), c(0.0, 4.0)])).unwrap();
        assert!((s.norm_squared() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn angle_examples() {
        let zero = QuantumState::basis(2, 0).unwrap();
        let one = QuantumState::basis(2, 1).unwrap();
        let plus = QuantumState::equal_superposition(2, 0, 1, 0.0).unwrap();
        assert_eq!(angle(&zero, &zero).unwrap().radians(), 0.0);
        assert!((angle(&zero, &one).unwrap().radians() - FRAC_PI_2).abs() < 1e-15);
        assert!((angle(&zero, &plus).unwrap().radians() - FRAC_PI_4).abs() < 1e-15);
    }

    #[test]
    fn angle_dimension_mismatch() {
        let a = QuantumState::basis(2, 0).unwrap();
        let b = QuantumState::basis(3, 0).unwrap();
        assert!(matches!(
            angle(&a, &b),
            Err(QslError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn angle_range_checked() {
        assert!(Angle::new(-1e-3).is_err());
        assert!(Angle::new(2.0).is_err());
        assert!(Angle::new(FRAC_PI_2).is_ok());
        assert_eq!(Angle::from_overlap_magnitude(1.0 + 1e-16).radians(), 0.0);
    }

    #[test]
    fn tensor_product_ordering() {
        let one = QuantumState::basis(2, 1).unwrap();
        let zero = QuantumState::basis(2, 0).unwrap();
        // |1> ⊗ |0> = |10> = index 2
        let s = one.tensor(&zero);
        assert_eq!(s.amplitudes()[2], c(1.0, 0.0));
    }
}
