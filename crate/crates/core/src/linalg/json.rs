//! `{"n": int, "re": [[...]], "im": [[...]]}` matrix files.
//!
//! Arrays are row-major; `im` may be omitted for real matrices. Square
//! operands have `n` rows and `n` columns. Contractions may be rectangular, in
//! which case `n` is the row count and the column count is the common row
//! length.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{CMatrix, Complex64};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub n: usize,
    pub re: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<Vec<Vec<f64>>>,
}

pub fn matrix_from_json(doc: &MatrixJson) -> Result<CMatrix> {
    let rows = doc.n;
    if rows == 0 || doc.re.len() != rows {
        return Err(Error::Parse(format!("expected {rows} rows in \"re\", found {}", doc.re.len())));
    }
    let cols = doc.re[0].len();
    if cols == 0 || doc.re.iter().any(|r| r.len() != cols) {
        return Err(Error::Parse("ragged or empty rows in \"re\"".into()));
    }
    if let Some(im) = &doc.im {
        if im.len() != rows || im.iter().any(|r| r.len() != cols) {
            return Err(Error::Parse("\"im\" shape differs from \"re\"".into()));
        }
    }
    Ok(CMatrix::from_fn(rows, cols, |i, j| {
        let im = doc.im.as_ref().map_or(0.0, |m| m[i][j]);
        Complex64::new(doc.re[i][j], im)
    }))
}

/// Omits `im` when every imaginary part is zero.
pub fn matrix_to_json(m: &CMatrix) -> MatrixJson {
    let re = (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)].re).collect()).collect();
    let im: Vec<Vec<f64>> = (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)].im).collect()).collect();
    let has_im = im.iter().flatten().any(|v| *v != 0.0);
    MatrixJson { n: m.nrows(), re, im: has_im.then_some(im) }
}

pub fn read_matrix_file(path: impl AsRef<Path>) -> Result<CMatrix> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let doc: MatrixJson = serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    matrix_from_json(&doc)
}
