//! `{"dim": n, "re": [[...]], "im": [[...]]}` matrix documents, row-major.
//! Non-square matrices carry `rows`/`cols` instead of `dim`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::matrix::{ComplexMatrix, HermitianMatrix};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    #[serde(rename = "type", default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rows: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cols: Option<usize>,
    pub re: Vec<Vec<f64>>,
    #[serde(default)]
    pub im: Option<Vec<Vec<f64>>>,
}

impl From<&ComplexMatrix> for MatrixJson {
    fn from(m: &ComplexMatrix) -> Self {
        let grid = |part: fn(&Complex64) -> f64| -> Vec<Vec<f64>> {
            (0..m.rows()).map(|i| (0..m.cols()).map(|j| part(&m[(i, j)])).collect()).collect()
        };
        let (dim, rows, cols) =
            if m.is_square() { (Some(m.rows()), None, None) } else { (None, Some(m.rows()), Some(m.cols())) };
        MatrixJson { kind: None, dim, rows, cols, re: grid(|z| z.re), im: Some(grid(|z| z.im)) }
    }
}

impl From<&HermitianMatrix> for MatrixJson {
    fn from(m: &HermitianMatrix) -> Self {
        MatrixJson::from(m.as_matrix())
    }
}

impl MatrixJson {
    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        let rows = self.dim.or(self.rows).unwrap_or(self.re.len());
        let cols = self.dim.or(self.cols).unwrap_or_else(|| self.re.first().map_or(0, Vec::len));
        if rows == 0 || cols == 0 {
            return Err(Error::Format("matrix must have positive dimensions".into()));
        }
        let check = |grid: &Vec<Vec<f64>>, name: &str| -> Result<()> {
            if grid.len() != rows || grid.iter().any(|r| r.len() != cols) {
                return Err(Error::Format(format!("`{name}` is not a {rows}x{cols} array")));
            }
            Ok(())
        };
        check(&self.re, "re")?;
        if let Some(im) = &self.im {
            check(im, "im")?;
        }
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                let im = self.im.as_ref().map_or(0.0, |g| g[i][j]);
                data.push(Complex64::new(self.re[i][j], im));
            }
        }
        ComplexMatrix::from_row_major(rows, cols, data)
    }

    pub fn to_hermitian(&self) -> Result<HermitianMatrix> {
        HermitianMatrix::new(self.to_matrix()?)
    }
}

pub fn matrix_from_json_str(s: &str) -> Result<ComplexMatrix> {
    serde_json::from_str::<MatrixJson>(s)?.to_matrix()
}
