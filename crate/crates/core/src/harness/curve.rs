use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;

use crate::bc::{bc_poly, default_optimizer};
use crate::bounds::mean_energy_functional;
use crate::error::{QslError, Result};
use crate::harness::format::format_number;

pub const CURVE_HEADER: &str =
    "cos_theta,theta,glm_beta_dimensionless,mean_e_dimensionless,bc_dimensionless,bc_poly";

/// Dimensionless bounds at one point of the `cos(theta)` grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveRow {
    pub cos_theta: f64,
    pub theta: f64,
    pub glm_beta: f64,
    pub mean_e: f64,
    pub bc: f64,
    pub bc_poly: f64,
}

impl CurveRow {
    fn csv(&self) -> String {
        [
            self.cos_theta,
            self.theta,
            self.glm_beta,
            self.mean_e,
            self.bc,
            self.bc_poly,
        ]
        .map(format_number)
        .join(",")
    }
}

/// Rows on a uniform grid of `points` values of `cos(theta)` from 0 to 1.
pub fn curve_rows(points: usize) -> Result<Vec<CurveRow>> {
    if points < 2 {
        return Err(QslError::OutOfRange {
            what: "points",
            range: "[2, inf)",
            value: points as f64,
        });
    }
    let optimizer = default_optimizer();
    (0..points)
        .into_par_iter()
        .map(|k| {
            let u = if k + 1 == points {
                1.0
            } else {
                k as f64 / (points - 1) as f64
            };
            let theta = u.acos();
            Ok(CurveRow {
                cos_theta: u,
                theta,
                glm_beta: theta,
                mean_e: mean_energy_functional(theta),
                bc: optimizer.value(theta)?,
                bc_poly: bc_poly(u)?,
            })
        })
        .collect()
}

/// Writes the curve CSV and returns the number of data rows.
pub fn emit_curves(points: usize, output_path: &Path) -> Result<usize> {
    let rows = curve_rows(points)?;
    let io_error = |source| QslError::Io {
        path: output_path.to_path_buf(),
        source,
    };
    let mut out = BufWriter::new(File::create(output_path).map_err(io_error)?);
    writeln!(out, "{CURVE_HEADER}").map_err(io_error)?;
    for row in &rows {
        writeln!(out, "{}", row.csv()).map_err(io_error)?;
    }
    out.flush().map_err(io_error)?;
    Ok(rows.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoints() {
        let rows = curve_rows(3).unwrap();
        assert_eq!(rows[0].bc_poly, 1.57);
        assert!((rows[0].bc - std::f64::consts::FRAC_PI_2).abs() < 1e-9);
        let last = rows[2];
        assert_eq!(last.cos_theta, 1.0);
        assert_eq!(
            [last.glm_beta, last.mean_e, last.bc, last.bc_poly],
            [0.0; 4]
        );
        assert!(curve_rows(1).is_err());
    }

    #[test]
    fn writes_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("curve.csv");
        assert_eq!(emit_curves(5, &path).unwrap(), 5);
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with(CURVE_HEADER));
        assert_eq!(text.lines().count(), 6);
        assert!(!text.contains('\r'));
    }
}
