//! Matrix literal format:
//!
//! ```json
//! {"rows": 2, "cols": 2, "entries": [[1,0,0,0], [0,0,1,0], [0,0,-1,0], [1,0,0,0]]}
//! ```
//!
//! Entries are row-major. A quaternion is `[w, x, y, z]`, a complex number
//! `[re, im]`; a bare number is accepted for a real entry in either field.

use num_traits::{Float, Zero};
use serde::{Deserialize, Serialize};

use super::Matrix;
use crate::scalar::{Real, Scalar};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Real(f64),
    Parts(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Entry>,
}

impl MatrixJson {
    pub fn from_matrix<S: Scalar>(m: &Matrix<S>) -> Self {
        MatrixJson {
            rows: m.rows(),
            cols: m.cols(),
            entries: m
                .data()
                .iter()
                .map(|x| Entry::Parts(x.components().into_iter().map(Real::as_f64).collect()))
                .collect(),
        }
    }

    pub fn to_matrix<S: Scalar>(&self) -> Result<Matrix<S>> {
        if self.rows == 0 || self.cols == 0 {
            return Err(Error::Parse("rows and cols must be positive".into()));
        }
        if self.entries.len() != self.rows * self.cols {
            return Err(Error::Parse(format!(
                "expected {} entries for a {}x{} matrix, found {}",
                self.rows * self.cols,
                self.rows,
                self.cols,
                self.entries.len()
            )));
        }
        let mut data = Vec::with_capacity(self.entries.len());
        for (idx, e) in self.entries.iter().enumerate() {
            let parts: Vec<S::Real> = match e {
                Entry::Real(v) => {
                    let mut p = vec![S::Real::zero(); S::REAL_DIM];
                    p[0] = S::Real::lit(*v);
                    p
                }
                Entry::Parts(v) if v.len() == S::REAL_DIM => v.iter().map(|&x| S::Real::lit(x)).collect(),
                Entry::Parts(v) => {
                    return Err(Error::Parse(format!(
                        "entry {idx} has {} components, {} field needs {}",
                        v.len(),
                        S::FIELD,
                        S::REAL_DIM
                    )))
                }
            };
            if parts.iter().any(|x| !x.is_finite()) {
                return Err(Error::Parse(format!("entry {idx} is not finite")));
            }
            data.push(S::from_components(&parts));
        }
        Matrix::from_vec(self.rows, self.cols, data)
    }
}

pub fn parse_matrix<S: Scalar>(text: &str) -> Result<Matrix<S>> {
    let j: MatrixJson = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    j.to_matrix()
}

pub fn matrix_to_json<S: Scalar>(m: &Matrix<S>) -> String {
    serde_json::to_string(&MatrixJson::from_matrix(m)).expect("matrix serialises")
}
