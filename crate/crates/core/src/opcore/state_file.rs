//! JSON state files: `{"dims": [2, d], "matrix": [[[re, im], ...], ...]}`,
//! row-major in the `|i j⟩ ↦ i·d + j` basis.

use std::fmt::Write;

use num_complex::Complex64;
use serde::Deserialize;

use super::{validate_density_with, ComplexMatrix, DensityMatrix, OpError, Tolerances};

#[derive(Deserialize)]
struct StateDoc {
    dims: Vec<usize>,
    matrix: Vec<Vec<[f64; 2]>>,
}

/// A parsed but not yet validated state.
#[derive(Debug, Clone, PartialEq)]
pub struct RawState {
    pub dim_a: usize,
    pub dim_b: usize,
    pub matrix: ComplexMatrix,
}

impl RawState {
    pub fn validate(self) -> Result<DensityMatrix, OpError> {
        self.validate_with(&Tolerances::default())
    }

    pub fn validate_with(self, tol: &Tolerances) -> Result<DensityMatrix, OpError> {
        validate_density_with(self.matrix, self.dim_a, self.dim_b, tol)
    }
}

pub fn parse_state_json(text: &str) -> Result<RawState, OpError> {
    let doc: StateDoc = serde_json::from_str(text).map_err(|e| OpError::Format(e.to_string()))?;
    let [dim_a, dim_b] = doc.dims[..] else {
        return Err(OpError::Format(format!(
            "\"dims\" must have two entries, found {}",
            doc.dims.len()
        )));
    };
    let n = dim_a * dim_b;
    if doc.matrix.len() != n {
        return Err(OpError::Format(format!(
            "expected {n} rows for dims [{dim_a}, {dim_b}], found {}",
            doc.matrix.len()
        )));
    }
    if let Some((r, row)) = doc
        .matrix
        .iter()
        .enumerate()
        .find(|(_, row)| row.len() != n)
    {
        return Err(OpError::Format(format!(
            "row {r} has {} entries, expected {n}",
            row.len()
        )));
    }
    let matrix = ComplexMatrix::from_fn(n, n, |r, c| {
        let [re, im] = doc.matrix[r][c];
        Complex64::new(re, im)
    });
    Ok(RawState {
        dim_a,
        dim_b,
        matrix,
    })
}

/// Serializes with 17 significant digits per component.
pub fn to_state_json(rho: &DensityMatrix) -> String {
    let m = rho.matrix();
    let n = m.nrows();
    let mut out = String::new();
    let _ = writeln!(out, "{{");
    let _ = writeln!(out, "  \"dims\": [{}, {}],", rho.dim_a(), rho.dim_b());
    let _ = writeln!(out, "  \"matrix\": [");
    for r in 0..n {
        let row: Vec<String> = (0..n)
            .map(|c| format!("[{:.16e}, {:.16e}]", m[(r, c)].re, m[(r, c)].im))
            .collect();
        let sep = if r + 1 < n { "," } else { "" };
        let _ = writeln!(out, "    [{}]{sep}", row.join(", "));
    }
    let _ = writeln!(out, "  ]");
    out.push('}');
    out.push('\n');
    out
}
