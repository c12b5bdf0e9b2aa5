//! JSON state files: `{"dims": [d1, …, dk], "matrix": [[[re, im], …], …]}`,
//! row-major.

use std::fs;
use std::path::Path;

use gmre_core::{DensityMatrix, Matrix, PartyShape, C64};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum StateFileError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("field `{field}`: {message}")]
    Field { field: String, message: String },
    #[error("invalid state: {0}")]
    Invalid(gmre_core::Error),
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateDocument {
    dims: Vec<usize>,
    matrix: Vec<Vec<[f64; 2]>>,
}

fn field(field: impl Into<String>, message: impl Into<String>) -> StateFileError {
    StateFileError::Field {
        field: field.into(),
        message: message.into(),
    }
}

/// Parses and validates a state document. Hermiticity, unit trace and
/// positivity are checked to `1e-10`.
pub fn parse_state(text: &str) -> Result<DensityMatrix, StateFileError> {
    let doc: StateDocument = serde_json::from_str(text).map_err(|e| StateFileError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let shape = PartyShape::new(doc.dims.clone()).map_err(|e| field("dims", e.to_string()))?;
    let n = shape.total();
    if doc.matrix.len() != n {
        return Err(field(
            "matrix",
            format!("has {} rows, dims imply {n}", doc.matrix.len()),
        ));
    }
    let mut data = Vec::with_capacity(n * n);
    for (r, row) in doc.matrix.iter().enumerate() {
        if row.len() != n {
            return Err(field(
                format!("matrix[{r}]"),
                format!("has {} entries, expected {n}", row.len()),
            ));
        }
        for (c, [re, im]) in row.iter().enumerate() {
            if !re.is_finite() || !im.is_finite() {
                return Err(field(format!("matrix[{r}][{c}]"), "entry is not finite"));
            }
            data.push(C64::new(*re, *im));
        }
    }
    let matrix = Matrix::from_vec(n, n, data).map_err(|e| field("matrix", e.to_string()))?;
    DensityMatrix::new(shape, matrix).map_err(|e| match e {
        gmre_core::Error::NotHermitian { row, col, asymmetry } => field(
            format!("matrix[{row}][{col}]"),
            format!("differs from the conjugate of matrix[{col}][{row}] by {asymmetry:e}"),
        ),
        other => StateFileError::Invalid(other),
    })
}

pub fn read_state(path: &Path) -> Result<DensityMatrix, StateFileError> {
    let text = fs::read_to_string(path).map_err(|source| StateFileError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_state(&text)
}

/// Serializes a state. Entries are written in shortest round-trip form, so
/// reading the text back reproduces every entry exactly.
pub fn state_to_json(rho: &DensityMatrix) -> String {
    let m = rho.matrix();
    let n = m.rows();
    let doc = StateDocument {
        dims: rho.shape().dims().to_vec(),
        matrix: (0..n)
            .map(|r| (0..n).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect())
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("state documents always serialize")
}

pub fn write_state(path: &Path, rho: &DensityMatrix) -> std::io::Result<()> {
    fs::write(path, state_to_json(rho) + "\n")
}
