//! JSON encodings shared by the public types: complex numbers as `[re, im]`
//! pairs, matrices as row-major nested arrays.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{c, CMatrix};

pub type JsonComplex = [f64; 2];
pub type JsonMatrix = Vec<Vec<JsonComplex>>;

pub fn matrix_from_rows(rows: &[Vec<JsonComplex>]) -> Result<CMatrix> {
    let n_rows = rows.len();
    let n_cols = rows.first().map_or(0, Vec::len);
    if n_rows == 0 || n_cols == 0 || rows.iter().any(|r| r.len() != n_cols) {
        return Err(Error::InvalidOperator(
            "matrix must be a non-empty rectangle".into(),
        ));
    }
    Ok(CMatrix::from_fn(n_rows, n_cols, |i, j| {
        c(rows[i][j][0], rows[i][j][1])
    }))
}

pub fn matrix_to_rows(m: &CMatrix) -> JsonMatrix {
    (0..m.nrows())
        .map(|i| {
            (0..m.ncols())
                .map(|j| [m[(i, j)].re, m[(i, j)].im])
                .collect()
        })
        .collect()
}

/// `#[serde(with = "crate::io::matrix_list")]` for `Vec<CMatrix>` fields.
pub mod matrix_list {
    use super::*;

    pub fn serialize<S: Serializer>(ms: &[CMatrix], s: S) -> std::result::Result<S::Ok, S::Error> {
        ms.iter()
            .map(matrix_to_rows)
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Vec<CMatrix>, D::Error> {
        let raw: Vec<JsonMatrix> = Vec::deserialize(d)?;
        raw.iter()
            .map(|m| matrix_from_rows(m).map_err(serde::de::Error::custom))
            .collect()
    }
}

/// `#[serde(with = "crate::io::matrix")]` for a single `CMatrix` field.
pub mod matrix {
    use super::*;

    pub fn serialize<S: Serializer>(m: &CMatrix, s: S) -> std::result::Result<S::Ok, S::Error> {
        matrix_to_rows(m).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<CMatrix, D::Error> {
        let raw = JsonMatrix::deserialize(d)?;
        matrix_from_rows(&raw).map_err(serde::de::Error::custom)
    }
}
