//! JSON representation of complex matrices: nested rows of `[re, im]` pairs.
//! A bare number is accepted as a real entry on input.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::hermitian::HermitianOperator;
use crate::pointer::GaussianPointer;
use crate::scalar::{lit, to_f64, CMatrix, Real};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EntryJson {
    Pair([f64; 2]),
    Real(f64),
}

impl EntryJson {
    fn value(self) -> (f64, f64) {
        match self {
            EntryJson::Pair([a, b]) => (a, b),
            EntryJson::Real(a) => (a, 0.0),
        }
    }
}

pub type MatrixJson = Vec<Vec<EntryJson>>;

pub fn matrix_from_json<T: Real>(rows: &MatrixJson) -> Result<CMatrix<T>> {
    let n = rows.len();
    if n == 0 {
        return Err(Error::Validation("matrix has no rows".into()));
    }
    for (i, r) in rows.iter().enumerate() {
        if r.len() != n {
            return Err(Error::Validation(format!(
                "row {i} has {} entries, expected {n} for a square matrix",
                r.len()
            )));
        }
    }
    Ok(CMatrix::from_fn(n, n, |i, j| {
        let (a, b) = rows[i][j].value();
        Complex::new(lit(a), lit(b))
    }))
}

pub fn matrix_to_json<T: Real>(m: &CMatrix<T>) -> MatrixJson {
    (0..m.nrows())
        .map(|i| {
            (0..m.ncols())
                .map(|j| EntryJson::Pair([to_f64(m[(i, j)].re), to_f64(m[(i, j)].im)]))
                .collect()
        })
        .collect()
}

pub fn hermitian_from_json<T: Real>(rows: &MatrixJson) -> Result<HermitianOperator<T>> {
    HermitianOperator::new(matrix_from_json(rows)?)
}

pub fn density_from_json<T: Real>(rows: &MatrixJson) -> Result<DensityMatrix<T>> {
    DensityMatrix::new(matrix_from_json(rows)?)
}

pub fn parse_hermitian<T: Real>(text: &str) -> Result<HermitianOperator<T>> {
    hermitian_from_json(&serde_json::from_str(text)?)
}

/// Pointer in config form: either full moments or the pure-state shorthand.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PointerJson {
    Moments {
        var_x: f64,
        var_p: f64,
        #[serde(default)]
        sym_xp: f64,
        #[serde(default = "one")]
        kappa: f64,
        #[serde(default = "one")]
        hbar: f64,
    },
    Pure {
        sigma_e2: f64,
        purity: Purity,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Purity {
    Pure,
}

fn one() -> f64 {
    1.0
}

impl PointerJson {
    pub fn build<T: Real>(&self) -> Result<GaussianPointer<T>> {
        match *self {
            PointerJson::Moments {
                var_x,
                var_p,
                sym_xp,
                kappa,
                hbar,
            } => GaussianPointer::new(lit(var_x), lit(var_p), lit(sym_xp), lit(kappa), lit(hbar)),
            PointerJson::Pure { sigma_e2, .. } => GaussianPointer::pure_with_sigma_e2(lit(sigma_e2)),
        }
    }

    pub fn from_pointer<T: Real>(p: &GaussianPointer<T>) -> Self {
        PointerJson::Moments {
            var_x: to_f64(p.var_x()),
            var_p: to_f64(p.var_p()),
            sym_xp: to_f64(p.sym_xp()),
            kappa: to_f64(p.kappa()),
            hbar: to_f64(p.hbar()),
        }
    }
}
