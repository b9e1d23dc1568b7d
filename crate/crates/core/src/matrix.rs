//! Small helpers on dense complex matrices.

use num_complex::Complex;

use crate::scalar::{CMatrix, Real};

/// Largest absolute entry.
pub fn max_abs<T: Real>(m: &CMatrix<T>) -> T {
    m.iter().fold(T::zero(), |acc, z| acc.max(z.norm_sqr().sqrt()))
}

/// Largest entrywise deviation of `m` from its conjugate transpose.
pub fn hermiticity_defect<T: Real>(m: &CMatrix<T>) -> T {
    max_abs(&(m - m.adjoint()))
}

/// `(m + m†) / 2`.
pub fn hermitian_part<T: Real>(m: &CMatrix<T>) -> CMatrix<T> {
    (m + m.adjoint()) * Complex::new(crate::scalar::lit::<T>(0.5), T::zero())
}

pub fn trace<T: Real>(m: &CMatrix<T>) -> Complex<T> {
    m.trace()
}

/// `Tr(a b)` without forming the product.
pub fn trace_product<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> Complex<T> {
    let n = a.nrows();
    let mut acc = Complex::new(T::zero(), T::zero());
    for i in 0..n {
        for k in 0..n {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

pub fn commutator<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> CMatrix<T> {
    a * b - b * a
}

/// Frobenius norm.
pub fn frobenius<T: Real>(m: &CMatrix<T>) -> T {
    m.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt()
}

/// Largest entrywise deviation of `u† u` from the identity.
pub fn unitarity_defect<T: Real>(u: &CMatrix<T>) -> T {
    let n = u.nrows();
    max_abs(&(u.adjoint() * u - CMatrix::<T>::identity(n, n)))
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue<T: Real>(m: &CMatrix<T>) -> Option<T> {
    let eig = nalgebra::linalg::SymmetricEigen::try_new(
        hermitian_part(m),
        T::default_epsilon(),
        10_000,
    )?;
    Some(eig.eigenvalues.iter().fold(T::max_value().unwrap(), |acc, &e| acc.min(e)))
}

pub(crate) fn is_real<T: Real>(m: &CMatrix<T>) -> bool {
    m.iter().all(|z| z.im == T::zero())
}
