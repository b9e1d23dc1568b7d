//! Random instances for tests, property checks and benchmarks.

use nalgebra::DMatrix;
use num_complex::Complex;
use rand::Rng;

use crate::density::DensityMatrix;
use crate::hermitian::HermitianOperator;
use crate::pointer::GaussianPointer;
use crate::scalar::{lit, CMatrix, Real};

fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    // Box-Muller; the open interval keeps the logarithm finite.
    let u: f64 = 1.0 - rng.random::<f64>();
    let v: f64 = rng.random::<f64>();
    (-2.0 * u.ln()).sqrt() * (std::f64::consts::TAU * v).cos()
}

/// Ginibre matrix with unit-variance complex entries.
pub fn ginibre<T: Real, R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix<T> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    DMatrix::from_fn(rows, cols, |_, _| Complex::new(lit(s * normal(rng)), lit(s * normal(rng))))
}

/// GUE-like Hermitian matrix scaled so typical eigenvalues are `O(scale)`.
pub fn random_hermitian<T: Real, R: Rng + ?Sized>(rng: &mut R, dim: usize, scale: f64) -> HermitianOperator<T> {
    let g = ginibre::<T, R>(rng, dim, dim);
    let f: T = lit(scale / (2.0 * (dim as f64).sqrt()));
    let h = (&g + g.adjoint()).map(|z| z * f);
    HermitianOperator::new(h).expect("symmetrized matrix is Hermitian")
}

/// Density matrix `G G† / Tr G G†` of the requested rank.
pub fn random_density<T: Real, R: Rng + ?Sized>(rng: &mut R, dim: usize, rank: usize) -> DensityMatrix<T> {
    let g = ginibre::<T, R>(rng, dim, rank.max(1));
    DensityMatrix::normalized(&g * g.adjoint()).expect("Gram matrix is positive")
}

/// Haar-distributed unitary from the QR decomposition of a Ginibre matrix.
pub fn random_unitary<T: Real, R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CMatrix<T> {
    let qr = ginibre::<T, R>(rng, dim, dim).qr();
    let (mut q, r) = qr.unpack();
    for j in 0..dim {
        let d = r[(j, j)];
        let n = crate::scalar::cabs(d);
        if n > T::zero() {
            let phase = d / Complex::new(n, T::zero());
            for i in 0..dim {
                q[(i, j)] *= phase;
            }
        }
    }
    q
}

/// Pointer with `κ = ħ = 1`, `σ_e² ∈ [lo, hi]` log-uniform and a random
/// admissible mixedness and correlation.
pub fn random_pointer<T: Real, R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> GaussianPointer<T> {
    let var_x = (lo.ln() + (hi.ln() - lo.ln()) * rng.random::<f64>()).exp();
    let sym = rng.random_range(-1.0..1.0);
    let floor = (1.0 + sym * sym) / (4.0 * var_x);
    let var_p = floor * (1.0 + 3.0 * rng.random::<f64>());
    GaussianPointer::new(lit(var_x), lit(var_p), lit(sym), T::one(), T::one()).expect("admissible moments")
}
