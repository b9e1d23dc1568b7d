//! Spectral resolution `H = Σ_n e_n Π_n` with degenerate levels grouped.

use nalgebra::linalg::SymmetricEigen;
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::hermitian::HermitianOperator;
use crate::scalar::{lit, re, CMatrix, Real};

/// Distinct eigenvalues (ascending) with their orthogonal projectors.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition<T: Real> {
    eigenvalues: Vec<T>,
    projectors: Vec<CMatrix<T>>,
    degeneracies: Vec<usize>,
    /// Orthonormal eigenvectors as columns, ordered by level.
    basis: CMatrix<T>,
    /// Level index of each column of `basis`.
    column_level: Vec<usize>,
}

/// Default grouping tolerance: `1e-9` times the spectral range, with a floor
/// at a few ulps of the largest eigenvalue magnitude.
pub fn default_group_tolerance<T: Real>(sorted: &[T]) -> T {
    let (lo, hi) = (sorted[0], sorted[sorted.len() - 1]);
    let magnitude = lo.abs().max(hi.abs());
    lit::<T>(1e-9) * (hi - lo) + lit::<T>(64.0) * T::default_epsilon() * magnitude
}

/// Decomposes `h`, merging eigenvalues closer than `group_tol` (transitively).
pub fn spectral_decompose<T: Real>(
    h: &HermitianOperator<T>,
    group_tol: Option<T>,
) -> Result<SpectralDecomposition<T>> {
    SpectralDecomposition::new(h, group_tol)
}

impl<T: Real> SpectralDecomposition<T> {
    pub fn new(h: &HermitianOperator<T>, group_tol: Option<T>) -> Result<Self> {
        if let Some(t) = group_tol {
            if t < T::zero() {
                return Err(Error::Validation("grouping tolerance must be non-negative".into()));
            }
        }
        let n = h.dim();
        let eig = SymmetricEigen::try_new(h.matrix().clone(), T::default_epsilon(), 100_000)
            .ok_or_else(|| Error::Numeric("Hermitian eigensolver did not converge".into()))?;

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
        let sorted: Vec<T> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let tol = group_tol.unwrap_or_else(|| default_group_tolerance(&sorted));

        // consecutive gaps within tolerance chain into one level
        let mut groups: Vec<Vec<usize>> = vec![vec![0]];
        for k in 1..n {
            if sorted[k] - sorted[k - 1] <= tol {
                groups.last_mut().unwrap().push(k);
            } else {
                groups.push(vec![k]);
            }
        }

        let mut basis = CMatrix::<T>::zeros(n, n);
        for (col, &i) in order.iter().enumerate() {
            basis.set_column(col, &eig.eigenvectors.column(i));
        }

        let mut eigenvalues = Vec::with_capacity(groups.len());
        let mut projectors = Vec::with_capacity(groups.len());
        let mut degeneracies = Vec::with_capacity(groups.len());
        let mut column_level = vec![0; n];
        for (level, group) in groups.iter().enumerate() {
            let mean = group.iter().fold(T::zero(), |acc, &k| acc + sorted[k]) / lit(group.len() as f64);
            let mut proj = CMatrix::<T>::zeros(n, n);
            for &k in group {
                let v = basis.column(k);
                proj += v * v.adjoint();
                column_level[k] = level;
            }
            eigenvalues.push(mean);
            projectors.push(crate::matrix::hermitian_part(&proj));
            degeneracies.push(group.len());
        }

        Ok(Self {
            eigenvalues,
            projectors,
            degeneracies,
            basis,
            column_level,
        })
    }

    /// Validates hermiticity of a raw matrix first.
    pub fn of_matrix(m: &CMatrix<T>, group_tol: Option<T>) -> Result<Self> {
        Self::new(&HermitianOperator::new(m.clone())?, group_tol)
    }

    pub fn dim(&self) -> usize {
        self.basis.nrows()
    }

    /// Number of distinct levels.
    pub fn levels(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[T] {
        &self.eigenvalues
    }

    pub fn eigenvalue(&self, n: usize) -> T {
        self.eigenvalues[n]
    }

    pub fn projectors(&self) -> &[CMatrix<T>] {
        &self.projectors
    }

    pub fn projector(&self, n: usize) -> &CMatrix<T> {
        &self.projectors[n]
    }

    pub fn degeneracies(&self) -> &[usize] {
        &self.degeneracies
    }

    /// Unitary whose columns are orthonormal eigenvectors, grouped by level.
    pub fn basis(&self) -> &CMatrix<T> {
        &self.basis
    }

    /// Level index of eigenvector column `k`.
    pub fn column_level(&self, k: usize) -> usize {
        self.column_level[k]
    }

    /// Level energy of eigenvector column `k`.
    pub fn column_energy(&self, k: usize) -> T {
        self.eigenvalues[self.column_level[k]]
    }

    pub fn spectral_range(&self) -> T {
        self.eigenvalues[self.levels() - 1] - self.eigenvalues[0]
    }

    /// `Σ_n f(e_n) Π_n`.
    pub fn apply_function(&self, f: impl Fn(T) -> Complex<T>) -> CMatrix<T> {
        let n = self.dim();
        let mut out = CMatrix::<T>::zeros(n, n);
        for (e, p) in self.eigenvalues.iter().zip(&self.projectors) {
            out += p * f(*e);
        }
        out
    }

    /// `Σ_n e_n Π_n`.
    pub fn reconstruct(&self) -> CMatrix<T> {
        self.apply_function(re)
    }

    /// `Σ_n Π_n A Π_n`.
    pub fn pinch(&self, a: &CMatrix<T>) -> CMatrix<T> {
        let n = self.dim();
        let mut out = CMatrix::<T>::zeros(n, n);
        for p in &self.projectors {
            out += p * a * p;
        }
        out
    }

    /// Populations `Tr Π_n ρ` for an arbitrary matrix `ρ`.
    pub fn populations(&self, rho: &CMatrix<T>) -> Vec<T> {
        self.projectors
            .iter()
            .map(|p| crate::matrix::trace_product(p, rho).re)
            .collect()
    }
}
