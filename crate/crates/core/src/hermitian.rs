use num_complex::Complex;

use crate::error::{Error, Result};
use crate::matrix::{hermitian_part, hermiticity_defect, max_abs};
use crate::scalar::{lit, re, tol, CMatrix, Real};

/// A Hermitian operator on a `dim`-dimensional Hilbert space.
///
/// Construction validates `H = H†` within `1e-12 · max|H_ij|` and stores the
/// exactly symmetrized matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator<T: Real> {
    entries: CMatrix<T>,
}

impl<T: Real> HermitianOperator<T> {
    pub fn new(entries: CMatrix<T>) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(Error::Validation(format!(
                "operator is not square ({}x{})",
                entries.nrows(),
                entries.ncols()
            )));
        }
        if entries.nrows() == 0 {
            return Err(Error::Validation("operator has dimension zero".into()));
        }
        if entries.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::Validation("operator has non-finite entries".into()));
        }
        let scale = max_abs(&entries);
        let defect = hermiticity_defect(&entries);
        if defect > tol::<T>(1e-12) * scale {
            return Err(Error::Validation(format!(
                "operator is not Hermitian: max |H - H^dagger| = {defect}, scale {scale}"
            )));
        }
        Ok(Self {
            entries: hermitian_part(&entries),
        })
    }

    /// Real symmetric input given row by row.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let n = rows.len();
        let mut m = CMatrix::<T>::zeros(n, n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Validation(format!("row {i} has length {} (expected {n})", row.len())));
            }
            for (j, &x) in row.iter().enumerate() {
                m[(i, j)] = re(lit(x));
            }
        }
        Self::new(m)
    }

    pub fn diagonal(values: &[T]) -> Self {
        let n = values.len();
        let mut m = CMatrix::<T>::zeros(n, n);
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = re(v);
        }
        Self { entries: m }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            entries: CMatrix::zeros(dim, dim),
        }
    }

    pub fn pauli_x() -> Self {
        Self::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap()
    }

    pub fn pauli_y() -> Self {
        let z = Complex::new(T::zero(), T::zero());
        let i = Complex::new(T::zero(), T::one());
        Self::new(CMatrix::from_row_slice(2, 2, &[z, -i, i, z])).unwrap()
    }

    pub fn pauli_z() -> Self {
        Self::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]]).unwrap()
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.entries
    }

    pub fn into_matrix(self) -> CMatrix<T> {
        self.entries
    }

    pub fn scaled(&self, factor: T) -> Self {
        Self {
            entries: &self.entries * re(factor),
        }
    }

    /// True when every entry is real, i.e. the operator is invariant under
    /// complex conjugation in the working basis.
    pub fn is_real(&self) -> bool {
        crate::matrix::is_real(&self.entries)
    }

    /// `Tr(H A)` for an arbitrary matrix `A`.
    pub fn trace_with(&self, a: &CMatrix<T>) -> Complex<T> {
        crate::matrix::trace_product(&self.entries, a)
    }
}

impl<T: Real> std::ops::Add for &HermitianOperator<T> {
    type Output = HermitianOperator<T>;

    fn add(self, rhs: Self) -> HermitianOperator<T> {
        HermitianOperator {
            entries: &self.entries + &rhs.entries,
        }
    }
}
