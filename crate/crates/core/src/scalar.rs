//! Scalar abstraction shared by every numerical type in the workspace.

use nalgebra::{DMatrix, RealField};
use num_complex::Complex;
use num_traits::ToPrimitive;

/// Real scalar the toolkit is generic over. Implemented for `f32` and `f64`.
pub trait Real: RealField + Copy + ToPrimitive + Default {}

impl Real for f32 {}
impl Real for f64 {}

/// Dense complex matrix over a [`Real`] scalar.
pub type CMatrix<T> = DMatrix<Complex<T>>;

/// Converts an `f64` literal into `T`.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    nalgebra::convert(x)
}

/// Converts `T` back into `f64`.
#[inline]
pub fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// A tolerance stated for `f64`, rescaled to the precision of `T`.
///
/// For `f64` this is the identity; for `f32` the tolerance grows by the ratio
/// of machine epsilons.
#[inline]
pub fn tol<T: Real>(x: f64) -> T {
    let ratio = to_f64(T::default_epsilon()) / f64::EPSILON;
    lit(x * ratio.max(1.0))
}

#[inline]
pub fn re<T: Real>(x: T) -> Complex<T> {
    Complex::new(x, T::zero())
}

/// `exp(i θ)`.
#[inline]
pub fn cis<T: Real>(theta: T) -> Complex<T> {
    Complex::new(theta.cos(), theta.sin())
}

/// Complex exponential.
#[inline]
pub fn cexp<T: Real>(z: Complex<T>) -> Complex<T> {
    cis(z.im) * z.re.exp()
}

/// Modulus `|z|`.
#[inline]
pub fn cabs<T: Real>(z: Complex<T>) -> T {
    z.re.hypot(z.im)
}
