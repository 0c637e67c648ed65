use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bounds::BoundReport;
use crate::error::QslError;

/// Significant digits of every number written to CSV.
const SIGNIFICANT_DIGITS: usize = 12;

/// Column order of a serialized [`BoundReport`].
pub const REPORT_FIELDS: [&str; 10] = [
    "theta",
    "glm_beta",
    "mean_min_e",
    "max_mean_e",
    "max_min",
    "delta_e_variant",
    "bc",
    "tightest_label",
    "tightest_value",
    "saturation_ratio",
];

/// Display unit for times. Internal values are always in hbar = 1 units.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Units {
    H,
    #[default]
    Hbar,
}

impl Units {
    pub fn time(self, t: f64) -> f64 {
        match self {
            Units::H => t / TAU,
            Units::Hbar => t,
        }
    }
}

impl FromStr for Units {
    type Err = QslError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "h" => Ok(Units::H),
            "hbar" => Ok(Units::Hbar),
            other => Err(QslError::InvalidArgument(format!(
                "units must be h or hbar, got {other}"
            ))),
        }
    }
}

impl fmt::Display for Units {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Units::H => "h",
            Units::Hbar => "hbar",
        })
    }
}

/// `%.12g`-style formatting; infinities print as `inf` / `-inf`.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    let (mantissa, exponent) = sci.split_once('e').expect("exponent marker");
    let exponent: i32 = exponent.parse().expect("integer exponent");
    if exponent < -4 || exponent >= SIGNIFICANT_DIGITS as i32 {
        let mantissa = trim_zeros(mantissa);
        let sign = if exponent < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exponent.abs())
    } else {
        let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exponent).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn report_csv_header() -> String {
    REPORT_FIELDS.join(",")
}

fn optional(value: Option<f64>, units: Units) -> String {
    value.map_or_else(String::new, |v| format_number(units.time(v)))
}

/// One CSV row; absent entries are left empty. Angles stay in radians.
pub fn report_csv_row(report: &BoundReport, units: Units) -> String {
    let time = |v: f64| format_number(units.time(v));
    [
        format_number(report.theta),
        time(report.glm_beta),
        time(report.mean_min_e),
        optional(report.max_mean_e, units),
        time(report.max_min),
        time(report.delta_e_variant),
        time(report.bc),
        report.tightest.label.as_str().to_string(),
        time(report.tightest.value),
        report
            .saturation_ratio
            .map_or_else(String::new, format_number),
    ]
    .join(",")
}

/// `key = value` lines in [`REPORT_FIELDS`] order.
pub fn report_text(report: &BoundReport, units: Units) -> String {
    let row = report_csv_row(report, units);
    let mut out = String::new();
    for (key, value) in REPORT_FIELDS.iter().zip(row.split(',')) {
        let value = if value.is_empty() { "none" } else { value };
        out.push_str(&format!("{key} = {value}\n"));
    }
    out.push_str(&format!("units = {units}\n"));
    if report.frozen {
        out.push_str("frozen = true\n");
    }
    out
}
