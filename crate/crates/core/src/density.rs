use num_complex::Complex;

use crate::error::{check_dim, Error, Result};
use crate::hermitian::HermitianOperator;
use crate::matrix::{commutator, hermitian_part, hermiticity_defect, max_abs, trace_product};
use crate::scalar::{lit, re, tol, CMatrix, Real};
use crate::spectral::SpectralDecomposition;

/// Positive semidefinite, unit-trace operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix<T: Real> {
    entries: CMatrix<T>,
}

impl<T: Real> DensityMatrix<T> {
    /// Validates hermiticity, `Tr ρ = 1` within `1e-12` and smallest
    /// eigenvalue `≥ -1e-10`.
    pub fn new(entries: CMatrix<T>) -> Result<Self> {
        let h = HermitianOperator::new(entries)?;
        let entries = h.into_matrix();
        let trace = entries.trace().re;
        if (trace - T::one()).abs() > tol::<T>(1e-12) {
            return Err(Error::Validation(format!("density matrix trace is {trace}, expected 1")));
        }
        let min = crate::matrix::min_eigenvalue(&entries)
            .ok_or_else(|| Error::Numeric("eigensolver did not converge".into()))?;
        if min < -tol::<T>(1e-10) {
            return Err(Error::Validation(format!(
                "density matrix is not positive semidefinite (smallest eigenvalue {min})"
            )));
        }
        Ok(Self { entries })
    }

    /// Divides by the trace before validating; for results of linear maps
    /// that accumulate rounding in the normalization.
    pub fn normalized(entries: CMatrix<T>) -> Result<Self> {
        let t = entries.trace().re;
        if !(t > T::zero()) {
            return Err(Error::Validation(format!("cannot normalize operator with trace {t}")));
        }
        Self::new(hermitian_part(&entries) / re(t))
    }

    /// `|ψ⟩⟨ψ|` for a (not necessarily normalized) state vector.
    pub fn pure(psi: &[Complex<T>]) -> Result<Self> {
        let v = nalgebra::DVector::from_column_slice(psi);
        let norm2 = v.iter().fold(T::zero(), |a, z| a + z.norm_sqr());
        if !(norm2 > T::zero()) {
            return Err(Error::Validation("state vector has zero norm".into()));
        }
        Self::new(&v * v.adjoint() / re(norm2))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            entries: CMatrix::identity(dim, dim) / re(lit::<T>(dim as f64)),
        }
    }

    /// Canonical state `exp(-βH)/Z`, evaluated with energies shifted by the
    /// ground energy so that no exponential overflows.
    pub fn canonical(h: &HermitianOperator<T>, beta: T) -> Result<Self> {
        let d = SpectralDecomposition::new(h, None)?;
        Self::canonical_from(&d, beta)
    }

    pub fn canonical_from(d: &SpectralDecomposition<T>, beta: T) -> Result<Self> {
        if beta < T::zero() || !beta.is_finite() {
            return Err(Error::Validation(format!("inverse temperature must be finite and >= 0, got {beta}")));
        }
        let ground = d.eigenvalue(0);
        let unnormalized = d.apply_function(|e| re((-(beta * (e - ground))).exp()));
        Self::normalized(unnormalized)
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

    /// `Tr(A ρ)`.
    pub fn expectation(&self, a: &CMatrix<T>) -> Complex<T> {
        trace_product(a, &self.entries)
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> T {
        trace_product(&self.entries, &self.entries).re
    }

    /// `Σ_n Π_n ρ Π_n`: the state after a non-selective projective
    /// measurement in the eigenbasis of `d`.
    pub fn project_diagonal(&self, d: &SpectralDecomposition<T>) -> Result<Self> {
        check_dim(self.dim(), d.dim())?;
        Self::new(hermitian_part(&d.pinch(&self.entries)))
    }

    /// Largest entry of `[H, ρ]`.
    pub fn commutator_defect(&self, h: &HermitianOperator<T>) -> T {
        max_abs(&commutator(h.matrix(), &self.entries))
    }

    /// Eigen-decomposition `ρ = Σ_j r_j |χ_j⟩⟨χ_j|`, dropping weights at or
    /// below `cutoff`.
    pub fn pure_components(&self, cutoff: T) -> Result<Vec<(T, Vec<Complex<T>>)>> {
        let eig = nalgebra::linalg::SymmetricEigen::try_new(self.entries.clone(), T::default_epsilon(), 100_000)
            .ok_or_else(|| Error::Numeric("eigensolver did not converge".into()))?;
        Ok(eig
            .eigenvalues
            .iter()
            .enumerate()
            .filter(|(_, &w)| w > cutoff)
            .map(|(k, &w)| (w, eig.eigenvectors.column(k).iter().copied().collect()))
            .collect())
    }

    pub fn is_hermitian_within(&self, t: T) -> bool {
        hermiticity_defect(&self.entries) <= t
    }
}

/// Free-function form of [`DensityMatrix::canonical`].
pub fn canonical_state<T: Real>(h: &HermitianOperator<T>, beta: T) -> Result<DensityMatrix<T>> {
    DensityMatrix::canonical(h, beta)
}

/// Free-function form of [`DensityMatrix::project_diagonal`].
pub fn project_diagonal<T: Real>(rho: &DensityMatrix<T>, d: &SpectralDecomposition<T>) -> Result<DensityMatrix<T>> {
    rho.project_diagonal(d)
}
