//! Exact evolution under a time-independent Hamiltonian.
//!
//! With `|psi(0)> = sum_n c_n |psi_n>` the evolved state is
//! `sum_n c_n e^{-i E_n t} |psi_n>` and the overlap with the initial state is
//! `S(t) = sum_n |c_n|^2 e^{-i E_n t}`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{QslError, Result};
use crate::hamiltonian::{energy_stats, HamiltonianSystem};
use crate::state::{Angle, QuantumState};

/// Absolute time resolution of [`first_passage`].
pub const PASSAGE_TIME_TOLERANCE: f64 = 1e-10;

/// Slack on `|S|^2` when deciding that the target has been reached. Touches
/// of the target are located to roughly `sqrt(slack)` in time.
pub const PASSAGE_VALUE_SLACK: f64 = 1e-14;

/// Upper cap on the default search horizon.
pub const MAX_DEFAULT_HORIZON: f64 = 1e6;

/// `|psi(t)> = e^{-iHt} |psi(0)>`. Negative `t` evolves backwards.
pub fn evolve(system: &HamiltonianSystem, initial: &QuantumState, t: f64) -> Result<QuantumState> {
    let coefficients = system.coefficients(initial)?;
    let phased = DVector::from_iterator(
        coefficients.len(),
        coefficients
            .iter()
            .zip(system.eigenvalues().iter())
            .map(|(c, &e)| c * Complex64::from_polar(1.0, -e * t)),
    );
    Ok(QuantumState::from_unitary_image(
        system.eigenvectors() * phased,
    ))
}

/// The propagator `e^{-iHt}` as a dense unitary matrix.
pub fn propagator(system: &HamiltonianSystem, t: f64) -> DMatrix<Complex64> {
    let phases = DMatrix::from_diagonal(
        &system
            .eigenvalues()
            .map(|e| Complex64::from_polar(1.0, -e * t)),
    );
    system.eigenvectors() * phases * system.eigenvectors().adjoint()
}

/// One point of the overlap trajectory `S(t) = cos(theta) e^{i phase}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OverlapSample {
    pub time: f64,
    pub s_real: f64,
    pub s_imag: f64,
    pub theta: f64,
    pub phase: f64,
}

impl OverlapSample {
    fn from_overlap(time: f64, s: Complex64) -> Self {
        Self {
            time,
            s_real: s.re,
            s_imag: s.im,
            theta: Angle::from_overlap_magnitude(s.norm()).radians(),
            phase: s.arg(),
        }
    }

    pub fn angle(&self) -> Angle {
        Angle::from_overlap_magnitude(self.s_real.hypot(self.s_imag))
    }
}

/// Eigenbasis populations of a fixed initial state, for repeated overlap evaluation.
#[derive(Debug, Clone)]
pub struct OverlapTrace {
    energies: Vec<f64>,
    populations: Vec<f64>,
}

impl OverlapTrace {
    pub fn new(system: &HamiltonianSystem, initial: &QuantumState) -> Result<Self> {
        let populations = system.populations(initial)?;
        Ok(Self {
            energies: system.eigenvalues().iter().copied().collect(),
            populations: populations.iter().copied().collect(),
        })
    }

    pub fn overlap(&self, t: f64) -> Complex64 {
        self.energies
            .iter()
            .zip(&self.populations)
            .map(|(&e, &p)| Complex64::from_polar(p, -e * t))
            .sum()
    }

    pub fn sample(&self, t: f64) -> OverlapSample {
        OverlapSample::from_overlap(t, self.overlap(t))
    }

    /// `|S(t)|^2` evaluated with energies measured from `reference`; the
    /// reference only changes rounding, not the value.
    fn overlap_norm_sqr(&self, t: f64, reference: f64) -> f64 {
        self.energies
            .iter()
            .zip(&self.populations)
            .map(|(&e, &p)| Complex64::from_polar(p, -(e - reference) * t))
            .sum::<Complex64>()
            .norm_sqr()
    }
}

/// `S(t) = <psi(0)|psi(t)>` from the eigenbasis populations.
pub fn overlap(
    system: &HamiltonianSystem,
    initial: &QuantumState,
    t: f64,
) -> Result<OverlapSample> {
    Ok(OverlapTrace::new(system, initial)?.sample(t))
}

/// How far in time a search or a sampled trajectory extends.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub enum TMaxPolicy {
    /// `4 pi dim / gap` with `gap` the smallest nonzero level spacing, capped at 1e6.
    #[default]
    Quasiperiod,
    /// `factor * pi / (2 spread)`: multiples of the orthogonalization scale of the spread bound.
    SpreadScaled(f64),
    Fixed(f64),
}

impl TMaxPolicy {
    pub fn resolve(&self, system: &HamiltonianSystem, initial: &QuantumState) -> Result<f64> {
        match *self {
            TMaxPolicy::Quasiperiod => Ok(default_t_max(system)),
            TMaxPolicy::SpreadScaled(factor) => {
                let stats = energy_stats(initial, system)?;
                if stats.is_stationary() {
                    return Ok(default_t_max(system));
                }
                Ok((factor * PI / (2.0 * stats.spread)).min(MAX_DEFAULT_HORIZON))
            }
            TMaxPolicy::Fixed(t) => Ok(t),
        }
    }
}

/// Default search horizon, see [`TMaxPolicy::Quasiperiod`].
pub fn default_t_max(system: &HamiltonianSystem) -> f64 {
    match system.smallest_gap() {
        Some(gap) => (4.0 * PI * system.dimension() as f64 / gap).min(MAX_DEFAULT_HORIZON),
        None => MAX_DEFAULT_HORIZON,
    }
}

/// Earliest time in `(0, t_max]` at which the evolution angle reaches `target_theta`.
///
/// The search scans `|S(t)|^2` with step `min(0.01, 0.1 / spread)` and refines
/// every scan interval that may dip to `cos^2(target)`. `|S|^2` is a trigonometric
/// polynomial whose second derivative is bounded by `2 spread^2`, which gives a
/// rigorous lower bound on each interval, so no crossing and no tangential
/// touch is skipped. A target of 0 is reached at `t = 0`.
pub fn first_passage(
    system: &HamiltonianSystem,
    initial: &QuantumState,
    target_theta: f64,
    t_max: f64,
) -> Result<f64> {
    let target = Angle::new(target_theta)?;
    if !(t_max > 0.0 && t_max.is_finite()) {
        return Err(QslError::InvalidArgument(format!(
            "t_max must be positive and finite, got {t_max}"
        )));
    }
    let stats = energy_stats(initial, system)?;
    if target.radians() == 0.0 {
        return Ok(0.0);
    }
    if stats.is_stationary() {
        return Err(QslError::ZeroSpread);
    }

    let search = PassageSearch {
        trace: OverlapTrace::new(system, initial)?,
        reference: stats.mean,
        threshold: target.cos().powi(2) + PASSAGE_VALUE_SLACK,
        curvature: 2.0 * stats.spread * stats.spread * (1.0 + 1e-9),
    };
    let step = (0.1 / stats.spread).min(0.01);
    let mut a = 0.0;
    let mut fa = 1.0;
    let mut k = 0u64;
    while a < t_max {
        k += 1;
        let b = (k as f64 * step).min(t_max);
        let fb = search.value(b);
        if let Some(t) = search.refine(a, b, fa, fb) {
            return Ok(t);
        }
        a = b;
        fa = fb;
    }
    Err(QslError::NotReached {
        target: target_theta,
        t_max,
    })
}

struct PassageSearch {
    trace: OverlapTrace,
    reference: f64,
    threshold: f64,
    curvature: f64,
}

impl PassageSearch {
    fn value(&self, t: f64) -> f64 {
        self.trace.overlap_norm_sqr(t, self.reference)
    }

    /// Smallest possible value on `[a, b]` given the endpoint values and `|f''| <= curvature`.
    fn lower_bound(&self, a: f64, b: f64, fa: f64, fb: f64) -> f64 {
        let w = b - a;
        let half_m = 0.5 * self.curvature;
        // f(a + s) >= fa + s (slope - half_m w) + half_m s^2
        let linear = (fb - fa) / w - half_m * w;
        let s = if half_m > 0.0 {
            (-linear / (2.0 * half_m)).clamp(0.0, w)
        } else if linear < 0.0 {
            w
        } else {
            0.0
        };
        fa + s * linear + half_m * s * s
    }

    /// Earliest crossing in `(a, b]`, assuming `f(a) > threshold`.
    fn refine(&self, a: f64, b: f64, fa: f64, fb: f64) -> Option<f64> {
        if self.lower_bound(a, b, fa, fb) > self.threshold {
            return None;
        }
        let mid = 0.5 * (a + b);
        if b - a <= PASSAGE_TIME_TOLERANCE || mid <= a || mid >= b {
            // Either a crossing at b or a tangential touch inside the interval.
            return Some(if fb <= self.threshold { b } else { mid });
        }
        let fm = self.value(mid);
        if fm <= self.threshold {
            return Some(self.refine(a, mid, fa, fm).unwrap_or(mid));
        }
        self.refine(a, mid, fa, fm)
            .or_else(|| self.refine(mid, b, fm, fb))
    }
}
