//! Closed-form lower bounds on the time needed to rotate a state by `theta`.
//!
//! All times are in hbar = 1 units: at `theta = pi/2` the spread and
//! mean-energy bounds both reduce to `pi/2 = h/4` per unit energy.
//!
//! The arbitrary-angle mean-energy bound built on an implicitly defined
//! function `alpha(epsilon)` is not computed here: `alpha` has no closed form.

use std::f64::consts::{FRAC_2_PI, FRAC_PI_2};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{QslError, Result};
use crate::hamiltonian::EnergyStats;
use crate::state::Angle;

/// Angles above this are inconsistent with a stationary state.
const STATIONARY_ANGLE_TOLERANCE: f64 = 1e-6;

/// A bound expressed as a dimensionless product, e.g. `mean * tau / hbar`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DimensionlessBound(f64);

impl DimensionlessBound {
    pub fn new(value: f64) -> Result<Self> {
        if !(value >= 0.0 && value.is_finite()) {
            return Err(QslError::InvalidArgument(format!(
                "dimensionless bound must be finite and nonnegative, got {value}"
            )));
        }
        Ok(Self(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Minimal time for an energy scale `energy` (0 when the scale vanishes).
    pub fn time_for(self, energy: f64) -> f64 {
        if energy > 0.0 {
            self.0 / energy
        } else {
            0.0
        }
    }
}

/// `sqrt(1 + 4/pi^2)`, the amplitude of `cos(phi) - (2/pi) sin(phi)`.
pub fn mean_energy_amplitude() -> f64 {
    (1.0 + FRAC_2_PI * FRAC_2_PI).sqrt()
}

/// Dimensionless mean-energy functional `(pi/2) max(0, 1 - sqrt(1 + 4/pi^2) cos(theta))`.
pub fn mean_energy_functional(theta: f64) -> f64 {
    FRAC_PI_2 * (1.0 - mean_energy_amplitude() * theta.cos()).max(0.0)
}

/// Spread bound: `tau >= theta / spread`.
pub fn glm_beta_bound(spread: f64, theta: f64) -> Result<f64> {
    let theta = Angle::new(theta)?.radians();
    if theta == 0.0 {
        return Ok(0.0);
    }
    if !(spread > 0.0) {
        return Err(QslError::ZeroSpread);
    }
    Ok(theta / spread)
}

/// The four bounds sharing the mean-energy numerator, as times.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanEnergyBounds {
    /// Denominator `mean - e_min`.
    pub mean_min_e: f64,
    /// Denominator `e_max - mean`; absent when the spectrum has no upper bound.
    pub max_mean_e: Option<f64>,
    /// Denominator `half_width`.
    pub max_min: f64,
    /// Spread bound with `half_width` in place of the spread.
    pub delta_e_variant: f64,
}

/// Mean-energy bound family. Vanishing denominators give a vacuous 0.
pub fn mean_energy_family(stats: &EnergyStats, theta: f64) -> Result<MeanEnergyBounds> {
    let theta = Angle::new(theta)?.radians();
    let numerator = mean_energy_functional(theta);
    let zero = energy_zero(stats);
    let ratio = |num: f64, den: f64| if den > zero { num / den } else { 0.0 };
    Ok(MeanEnergyBounds {
        mean_min_e: ratio(numerator, stats.mean - stats.e_min),
        max_mean_e: stats
            .has_upper_bound()
            .then(|| ratio(numerator, stats.e_max - stats.mean)),
        max_min: ratio(numerator, stats.half_width),
        delta_e_variant: ratio(theta, stats.half_width),
    })
}

/// Energy differences at or below this are treated as zero.
fn energy_zero(stats: &EnergyStats) -> f64 {
    let upper = if stats.has_upper_bound() {
        stats.e_max.abs()
    } else {
        0.0
    };
    1e-12 * (1.0 + stats.mean.abs().max(stats.e_min.abs()).max(upper))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundLabel {
    GlmBeta,
    MeanMinE,
    MaxMeanE,
    MaxMin,
    DeltaEVariant,
    Bc,
}

impl BoundLabel {
    pub const ALL: [BoundLabel; 6] = [
        BoundLabel::GlmBeta,
        BoundLabel::MeanMinE,
        BoundLabel::MaxMeanE,
        BoundLabel::MaxMin,
        BoundLabel::DeltaEVariant,
        BoundLabel::Bc,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            BoundLabel::GlmBeta => "glm_beta",
            BoundLabel::MeanMinE => "mean_min_e",
            BoundLabel::MaxMeanE => "max_mean_e",
            BoundLabel::MaxMin => "max_min",
            BoundLabel::DeltaEVariant => "delta_e_variant",
            BoundLabel::Bc => "bc",
        }
    }
}

impl fmt::Display for BoundLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tightest {
    pub label: BoundLabel,
    pub value: f64,
}

/// Every bound at one angle, as minimal times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub theta: f64,
    pub glm_beta: f64,
    pub mean_min_e: f64,
    pub max_mean_e: Option<f64>,
    pub max_min: f64,
    pub delta_e_variant: f64,
    pub bc: f64,
    pub tightest: Tightest,
    /// `actual_time / tightest`, when an actual time was given and the tightest bound is positive.
    pub saturation_ratio: Option<f64>,
    /// The state is an eigenstate: every bound is vacuous.
    pub frozen: bool,
}

impl BoundReport {
    pub fn get(&self, label: BoundLabel) -> Option<f64> {
        match label {
            BoundLabel::GlmBeta => Some(self.glm_beta),
            BoundLabel::MeanMinE => Some(self.mean_min_e),
            BoundLabel::MaxMeanE => self.max_mean_e,
            BoundLabel::MaxMin => Some(self.max_min),
            BoundLabel::DeltaEVariant => Some(self.delta_e_variant),
            BoundLabel::Bc => Some(self.bc),
        }
    }

    /// Present entries in label order.
    pub fn entries(&self) -> impl Iterator<Item = (BoundLabel, f64)> + '_ {
        BoundLabel::ALL
            .into_iter()
            .filter_map(|label| self.get(label).map(|v| (label, v)))
    }

    /// `actual_time / bound` for one entry; `None` if the entry is absent or zero.
    pub fn saturation_of(&self, label: BoundLabel, actual_time: f64) -> Option<f64> {
        self.get(label)
            .filter(|&v| v > 0.0)
            .map(|v| actual_time / v)
    }
}

/// Evaluates every bound at `theta`. `bc_value` is the dimensionless bound on
/// `(mean - e_min) tau`, e.g. from [`crate::bc::bc_bound`].
pub fn bound_report(
    stats: &EnergyStats,
    theta: f64,
    bc_value: f64,
    actual_time: Option<f64>,
) -> Result<BoundReport> {
    let theta = Angle::new(theta)?.radians();
    let bc_value = DimensionlessBound::new(bc_value)?;

    if stats.is_stationary() {
        if theta > STATIONARY_ANGLE_TOLERANCE {
            return Err(QslError::ZeroSpread);
        }
        return Ok(BoundReport {
            theta,
            glm_beta: 0.0,
            mean_min_e: 0.0,
            max_mean_e: stats.has_upper_bound().then_some(0.0),
            max_min: 0.0,
            delta_e_variant: 0.0,
            bc: 0.0,
            tightest: Tightest {
                label: BoundLabel::GlmBeta,
                value: 0.0,
            },
            saturation_ratio: None,
            frozen: true,
        });
    }

    let family = mean_energy_family(stats, theta)?;
    let shifted_mean = stats.mean - stats.e_min;
    let bc = if shifted_mean > energy_zero(stats) {
        bc_value.time_for(shifted_mean)
    } else {
        0.0
    };
    let mut report = BoundReport {
        theta,
        glm_beta: glm_beta_bound(stats.spread, theta)?,
        mean_min_e: family.mean_min_e,
        max_mean_e: family.max_mean_e,
        max_min: family.max_min,
        delta_e_variant: family.delta_e_variant,
        bc,
        tightest: Tightest {
            label: BoundLabel::GlmBeta,
            value: 0.0,
        },
        saturation_ratio: None,
        frozen: false,
    };
    let mut tightest = Tightest {
        label: BoundLabel::GlmBeta,
        value: report.glm_beta,
    };
    for (label, value) in report.entries() {
        if value > tightest.value {
            tightest = Tightest { label, value };
        }
    }
    report.tightest = tightest;
    report.saturation_ratio = actual_time
        .filter(|_| tightest.value > 0.0)
        .map(|t| t / tightest.value);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_3;

    #[test]
    fn spread_bound_examples() {
        assert!((glm_beta_bound(1.0, FRAC_PI_2).unwrap() - FRAC_PI_2).abs() < 1e-15);
        assert_eq!(glm_beta_bound(1.0, 0.0).unwrap(), 0.0);
        assert_eq!(glm_beta_bound(0.0, 0.0).unwrap(), 0.0);
        let n = 1e6f64;
        assert!((glm_beta_bound(1.0, 2.0 / n.sqrt()).unwrap() - 2e-3).abs() < 1e-15);
        assert!(matches!(
            glm_beta_bound(0.0, 0.3),
            Err(QslError::ZeroSpread)
        ));
        assert!(glm_beta_bound(1.0, 1.6).is_err());
    }

    #[test]
    fn mean_energy_examples() {
        let stats = EnergyStats::new(1.0, 0.5, 0.0, 2.0).unwrap();
        let fam = mean_energy_family(&stats, FRAC_PI_2).unwrap();
        assert!((fam.mean_min_e - FRAC_PI_2).abs() < 1e-12);

        let fam = mean_energy_family(&stats, 0.0).unwrap();
        assert_eq!(fam.mean_min_e, 0.0);
        assert_eq!(fam.max_mean_e, Some(0.0));
        assert_eq!(fam.max_min, 0.0);
        assert_eq!(fam.delta_e_variant, 0.0);

        // mpmath: (pi/2)(1 - sqrt(1 + 4/pi^2)/2)
        let fam = mean_energy_family(&stats, FRAC_PI_3).unwrap();
        assert!((fam.mean_min_e - 0.639_748_382_235_603_3).abs() < 1e-14);
        assert!((mean_energy_amplitude() - 1.185_447_061_057_283_6).abs() < 1e-15);
    }

    #[test]
    fn vacuous_denominators() {
        // mean at the ground energy
        let stats = EnergyStats::new(0.0, 0.0, 0.0, 2.0).unwrap();
        let fam = mean_energy_family(&stats, 1.2).unwrap();
        assert_eq!(fam.mean_min_e, 0.0);
        assert!(fam.max_mean_e.unwrap() > 0.0);

        let unbounded = EnergyStats::new(1.0, 1.0, 0.0, f64::INFINITY).unwrap();
        let fam = mean_energy_family(&unbounded, 1.2).unwrap();
        assert_eq!(fam.max_mean_e, None);
        assert_eq!(fam.max_min, 0.0);
    }

    #[test]
    fn frozen_report() {
        let stats = EnergyStats::new(2.0, 0.0, 0.0, 4.0).unwrap();
        let r = bound_report(&stats, 0.0, 0.0, Some(3.0)).unwrap();
        assert!(r.frozen);
        assert!(r.entries().all(|(_, v)| v == 0.0));
        assert_eq!(r.saturation_ratio, None);
        assert!(matches!(
            bound_report(&stats, 0.5, 0.3, None),
            Err(QslError::ZeroSpread)
        ));
    }

    #[test]
    fn tightest_is_max() {
        let stats = EnergyStats::new(0.3, 0.4, 0.0, 1.0).unwrap();
        let r = bound_report(&stats, 1.4, 1.2, Some(10.0)).unwrap();
        let max = r.entries().map(|(_, v)| v).fold(0.0, f64::max);
        assert_eq!(r.tightest.value, max);
        assert_eq!(r.get(r.tightest.label), Some(max));
        assert_eq!(r.saturation_ratio, Some(10.0 / max));
        assert!(r.delta_e_variant >= r.max_min);
    }

    #[test]
    fn rejects_bad_inputs() {
        let stats = EnergyStats::new(0.3, 0.4, 0.0, 1.0).unwrap();
        assert!(bound_report(&stats, 1.4, -1.0, None).is_err());
        assert!(bound_report(&stats, -0.1, 1.0, None).is_err());
    }
}
