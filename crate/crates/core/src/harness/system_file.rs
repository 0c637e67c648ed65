use std::path::Path;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{QslError, Result};
use crate::hamiltonian::{spectral_decompose, HamiltonianSystem};
use crate::state::QuantumState;

/// On-disk system description: a row-major matrix and a state vector, every
/// entry a `[re, im]` pair.
///
/// ```json
/// {"hamiltonian": [[[1, 0], [0, 0]], [[0, 0], [-1, 0]]], "state": [[0.6, 0], [0.8, 0]]}
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemFile {
    pub hamiltonian: Vec<Vec<[f64; 2]>>,
    pub state: Vec<[f64; 2]>,
}

#[derive(Debug, Clone)]
pub struct LoadedSystem {
    pub system: HamiltonianSystem,
    pub state: QuantumState,
    /// `| ||psi|| - 1 |` of the state as written, before normalization.
    pub norm_deviation: f64,
}

impl LoadedSystem {
    pub fn needs_normalization_warning(&self) -> bool {
        self.norm_deviation > 1e-12
    }
}

fn complex(pair: [f64; 2]) -> Complex64 {
    Complex64::new(pair[0], pair[1])
}

/// Parses and validates a system description. `path` only labels errors.
pub fn parse_system(text: &str, path: &Path) -> Result<LoadedSystem> {
    let parse_error = |message: String| QslError::Parse {
        path: path.to_path_buf(),
        message,
    };
    let file: SystemFile = serde_json::from_str(text).map_err(|e| parse_error(e.to_string()))?;

    let rows = file.hamiltonian.len();
    if let Some(row) = file.hamiltonian.iter().find(|r| r.len() != rows) {
        return Err(parse_error(format!(
            "hamiltonian must be square: {rows} rows but a row of length {}",
            row.len()
        )));
    }
    if file.state.len() != rows {
        return Err(parse_error(format!(
            "state has {} entries, hamiltonian has dimension {rows}",
            file.state.len()
        )));
    }
    let values = file.hamiltonian.iter().flatten().chain(&file.state);
    if values.flatten().any(|v| !v.is_finite()) {
        return Err(parse_error("non-finite number".into()));
    }

    let matrix = DMatrix::from_fn(rows, rows, |i, j| complex(file.hamiltonian[i][j]));
    let system = spectral_decompose(matrix).map_err(|e| parse_error(e.to_string()))?;
    let amplitudes = DVector::from_iterator(rows, file.state.iter().copied().map(complex));
    let norm_deviation = (amplitudes.norm() - 1.0).abs();
    let state = QuantumState::normalized(amplitudes).map_err(|e| parse_error(e.to_string()))?;
    Ok(LoadedSystem {
        system,
        state,
        norm_deviation,
    })
}

pub fn load_system(path: &Path) -> Result<LoadedSystem> {
    let text = std::fs::read_to_string(path).map_err(|source| QslError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_system(&text, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_two_level_system() {
        let text = r#"{"hamiltonian": [[[1, 0], [0, 0]], [[0, 0], [-1, 0]]], "state": [[0.6, 0], [0.8, 0]]}"#;
        let loaded = parse_system(text, Path::new("t.json")).unwrap();
        assert_eq!(loaded.system.dimension(), 2);
        assert_eq!(loaded.system.e_min(), -1.0);
        assert!(!loaded.needs_normalization_warning());
    }

    #[test]
    fn normalizes_and_flags() {
        let text =
            r#"{"hamiltonian": [[[0, 0], [1, 0]], [[1, 0], [0, 0]]], "state": [[1, 0], [1, 0]]}"#;
        let loaded = parse_system(text, Path::new("t.json")).unwrap();
        assert!(loaded.needs_normalization_warning());
        assert!((loaded.state.norm_squared() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_files() {
        let cases = [
            r#"{"hamiltonian": [[[1, 0]]], "state": [[1, 0]]}"#,
            r#"{"hamiltonian": [[[0, 0], [1, 0]], [[2, 0], [0, 0]]], "state": [[1, 0], [0, 0]]}"#,
            r#"{"hamiltonian": [[[0, 0], [1, 0]], [[1, 0], [0, 0]]], "state": [[1, 0]]}"#,
            r#"{"hamiltonian": [[[0, 0], [1, 0]], [[1, 0]]], "state": [[1, 0], [0, 0]]}"#,
            r#"{"hamiltonian": [[[0, 0], [1, 0]], [[1, 0], [0, 0]]], "state": [[0, 0], [0, 0]]}"#,
            "not json",
        ];
        for text in cases {
            let err = parse_system(text, Path::new("bad.json")).unwrap_err();
            assert!(err.is_file_error(), "{text}: {err}");
        }
    }
}
