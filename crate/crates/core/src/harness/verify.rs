use std::f64::consts::FRAC_PI_2;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bc::{default_optimizer, BcOptimizer};
use crate::bounds::{bound_report, BoundLabel, BoundReport};
use crate::error::{QslError, Result};
use crate::evolution::{OverlapTrace, TMaxPolicy};
use crate::hamiltonian::{energy_stats, spectral_decompose, EnergyStats};
use crate::state::QuantumState;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// A sample violates a bound when `t < bound - violation * (1 + t)`.
    pub violation: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { violation: 1e-9 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub seed: u64,
    pub trials: usize,
    pub dim_max: usize,
    /// Sampled times per trial, `t_k = k t_max / samples` for `k = 1..=samples`.
    pub samples: usize,
    pub t_max_policy: TMaxPolicy,
    pub tolerances: Tolerances,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            trials: 100,
            dim_max: 8,
            samples: 64,
            t_max_policy: TMaxPolicy::SpreadScaled(4.0),
            tolerances: Tolerances::default(),
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dim_max < 2 {
            return Err(QslError::OutOfRange {
                what: "dim_max",
                range: "[2, inf)",
                value: self.dim_max as f64,
            });
        }
        if self.samples == 0 {
            return Err(QslError::InvalidArgument("samples must be positive".into()));
        }
        if !(self.tolerances.violation >= 0.0) {
            return Err(QslError::InvalidArgument(
                "violation tolerance must be nonnegative".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub seed: u64,
    pub trial: usize,
    pub dimension: usize,
    pub time: f64,
    pub theta: f64,
    pub bound_label: BoundLabel,
    /// `bound - time`.
    pub deficit: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub trials: usize,
    /// Distinct dimensions drawn, ascending.
    pub dimensions_tested: Vec<usize>,
    pub samples_per_trial: usize,
    pub violations: Vec<Violation>,
    /// Smallest `time / tightest bound` over all samples with a positive bound.
    pub worst_saturation: Option<f64>,
    /// Wall-clock time; not serialized so reports stay reproducible.
    #[serde(skip)]
    pub elapsed: Duration,
}

/// Generator of one trial, independent of how trials are scheduled.
pub fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

fn normal_complex(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// `(A + A^dagger) / 2` with independent standard-normal real and imaginary parts.
pub fn random_hermitian(dimension: usize, rng: &mut impl Rng) -> DMatrix<Complex64> {
    let a = DMatrix::from_fn(dimension, dimension, |_, _| normal_complex(rng));
    (&a + a.adjoint()).unscale(2.0)
}

pub fn random_state(dimension: usize, rng: &mut impl Rng) -> Result<QuantumState> {
    QuantumState::normalized(DVector::from_fn(dimension, |_, _| normal_complex(rng)))
}

/// Upper envelope of the BC value from a table on a uniform angle grid.
///
/// The bound is nondecreasing in the angle, so the table value at the next
/// grid point (plus a small slack) bounds it from above. The verifier only
/// runs the optimizer when the envelope could matter.
#[derive(Debug, Clone)]
pub struct BcEnvelope {
    table: Vec<f64>,
    slack: f64,
}

impl BcEnvelope {
    pub fn new(optimizer: &BcOptimizer, intervals: usize) -> Result<Self> {
        let intervals = intervals.max(1);
        let table = (0..=intervals)
            .into_par_iter()
            .map(|k| optimizer.value(FRAC_PI_2 * k as f64 / intervals as f64))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { table, slack: 1e-9 })
    }

    pub fn upper(&self, theta: f64) -> f64 {
        let intervals = self.table.len() - 1;
        let k = ((theta / FRAC_PI_2) * intervals as f64).ceil() as usize;
        self.table[k.min(intervals)] + self.slack
    }
}

struct TrialOutcome {
    dimension: usize,
    violations: Vec<Violation>,
    worst_saturation: Option<f64>,
}

fn min_option(a: Option<f64>, b: Option<f64>) -> Option<f64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

/// Bounds at one sample, with the exact BC value whenever it could be the
/// tightest entry or violated.
fn sample_report(
    stats: &EnergyStats,
    theta: f64,
    time: f64,
    margin: f64,
    envelope: &BcEnvelope,
    optimizer: &BcOptimizer,
) -> Result<BoundReport> {
    let provisional = bound_report(stats, theta, envelope.upper(theta), Some(time))?;
    if provisional.tightest.label == BoundLabel::Bc || provisional.bc > time - margin {
        bound_report(stats, theta, optimizer.value(theta)?, Some(time))
    } else {
        Ok(provisional)
    }
}

fn run_trial(
    config: &RunConfig,
    trial: usize,
    envelope: &BcEnvelope,
    optimizer: &BcOptimizer,
) -> Result<TrialOutcome> {
    let mut rng = trial_rng(config.seed, trial);
    let dimension = rng.random_range(2..=config.dim_max);
    let system = spectral_decompose(random_hermitian(dimension, &mut rng))?;
    let state = random_state(dimension, &mut rng)?;
    let stats = energy_stats(&state, &system)?;
    let mut outcome = TrialOutcome {
        dimension,
        violations: Vec::new(),
        worst_saturation: None,
    };
    if stats.is_stationary() {
        return Ok(outcome);
    }
    let trace = OverlapTrace::new(&system, &state)?;
    let t_max = config.t_max_policy.resolve(&system, &state)?;
    for k in 1..=config.samples {
        let time = t_max * k as f64 / config.samples as f64;
        let theta = trace.sample(time).theta;
        let margin = config.tolerances.violation * (1.0 + time);
        let report = sample_report(&stats, theta, time, margin, envelope, optimizer)?;
        for (label, bound) in report.entries() {
            if time < bound - margin {
                outcome.violations.push(Violation {
                    seed: config.seed,
                    trial,
                    dimension,
                    time,
                    theta,
                    bound_label: label,
                    deficit: bound - time,
                });
            }
        }
        outcome.worst_saturation = min_option(outcome.worst_saturation, report.saturation_ratio);
    }
    Ok(outcome)
}

/// Checks every bound on random Gaussian Hermitian systems and random states.
///
/// Trials run in parallel; the report only depends on the configuration.
pub fn verify_random(config: &RunConfig) -> Result<VerificationReport> {
    config.validate()?;
    let start = Instant::now();
    let optimizer = default_optimizer();
    let envelope = BcEnvelope::new(optimizer, 256)?;
    let outcomes = (0..config.trials)
        .into_par_iter()
        .map(|trial| run_trial(config, trial, &envelope, optimizer))
        .collect::<Result<Vec<_>>>()?;

    let mut dimensions: Vec<usize> = outcomes.iter().map(|o| o.dimension).collect();
    dimensions.sort_unstable();
    dimensions.dedup();
    let mut report = VerificationReport {
        trials: config.trials,
        dimensions_tested: dimensions,
        samples_per_trial: config.samples,
        violations: Vec::new(),
        worst_saturation: None,
        elapsed: Duration::ZERO,
    };
    for outcome in outcomes {
        report.violations.extend(outcome.violations);
        report.worst_saturation = min_option(report.worst_saturation, outcome.worst_saturation);
    }
    report.elapsed = start.elapsed();
    Ok(report)
}

/// Spread-bound saturation of `(|E_min> + |E_max>)/sqrt(2)` states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SaturationReport {
    pub trials: usize,
    pub samples_per_trial: usize,
    /// Every `time / glm_beta` ratio, trial-major.
    pub ratios: Vec<f64>,
}

impl SaturationReport {
    /// Largest `|ratio - 1|`.
    pub fn max_deviation(&self) -> f64 {
        self.ratios
            .iter()
            .map(|r| (r - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// Random spectra with the extremal equal superposition as initial state,
/// sampled at `t_k = k (pi / 2) / (spread samples)`, i.e. up to orthogonality.
pub fn verify_saturating(config: &RunConfig) -> Result<SaturationReport> {
    config.validate()?;
    let per_trial = (0..config.trials)
        .into_par_iter()
        .map(|trial| -> Result<Vec<f64>> {
            let mut rng = trial_rng(config.seed, trial);
            let dimension = rng.random_range(2..=config.dim_max);
            let system = spectral_decompose(random_hermitian(dimension, &mut rng))?;
            let amplitudes = (system.eigenstate(0).into_amplitudes()
                + system.eigenstate(dimension - 1).into_amplitudes())
            .unscale(2f64.sqrt());
            let state = QuantumState::normalized(amplitudes)?;
            let stats = energy_stats(&state, &system)?;
            let trace = OverlapTrace::new(&system, &state)?;
            let horizon = FRAC_PI_2 / stats.spread;
            (1..=config.samples)
                .map(|k| {
                    let time = horizon * k as f64 / config.samples as f64;
                    let theta = trace.sample(time).theta;
                    let report = bound_report(&stats, theta, 0.0, Some(time))?;
                    report
                        .saturation_of(BoundLabel::GlmBeta, time)
                        .ok_or(QslError::ZeroSpread)
                })
                .collect()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SaturationReport {
        trials: config.trials,
        samples_per_trial: config.samples,
        ratios: per_trial.into_iter().flatten().collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_run() {
        let config = RunConfig {
            trials: 0,
            ..RunConfig::default()
        };
        let report = verify_random(&config).unwrap();
        assert!(report.violations.is_empty());
        assert!(report.dimensions_tested.is_empty());
        assert_eq!(report.worst_saturation, None);
    }

    #[test]
    fn small_run_is_clean_and_reproducible() {
        let config = RunConfig {
            seed: 7,
            trials: 12,
            samples: 16,
            ..RunConfig::default()
        };
        let a = verify_random(&config).unwrap();
        let b = verify_random(&config).unwrap();
        assert!(a.violations.is_empty());
        assert!(a.worst_saturation.unwrap() >= 1.0 - 1e-9);
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }

    #[test]
    fn trial_streams_differ() {
        let x: u64 = trial_rng(1, 0).random();
        let y: u64 = trial_rng(1, 1).random();
        let z: u64 = trial_rng(1, 0).random();
        assert_ne!(x, y);
        assert_eq!(x, z);
    }

    #[test]
    fn envelope_dominates() {
        let optimizer = default_optimizer();
        let envelope = BcEnvelope::new(optimizer, 16).unwrap();
        for k in 0..=40 {
            let theta = FRAC_PI_2 * k as f64 / 40.0;
            assert!(envelope.upper(theta) >= optimizer.value(theta).unwrap());
        }
    }

    #[test]
    fn saturating_states() {
        let config = RunConfig {
            seed: 3,
            trials: 4,
            samples: 16,
            ..RunConfig::default()
        };
        let report = verify_saturating(&config).unwrap();
        assert_eq!(report.ratios.len(), 64);
        assert!(report.max_deviation() < 1e-9);
    }

    #[test]
    fn rejects_bad_config() {
        let config = RunConfig {
            dim_max: 1,
            ..RunConfig::default()
        };
        assert!(verify_random(&config).is_err());
    }
}
