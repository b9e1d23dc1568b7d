//! Numerical foundations for quantum work statistics: Hermitian operators
//! and their spectral projectors, density matrices, driving protocols and
//! Gaussian pointer states.
//!
//! Every type is generic over a [`Real`] scalar; `f64` aliases are exported
//! for the common case.

// `!(x > 0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod density;
pub mod dynamics;
pub mod error;
pub mod hermitian;
pub mod json;
pub mod matrix;
pub mod pointer;
pub mod sample;
pub mod scalar;
pub mod spectral;

pub use density::{canonical_state, project_diagonal, DensityMatrix};
pub use dynamics::{
    evolution_operator, propagator_from_schedule, untouched_average_work, Protocol, Schedule, Segment,
};
pub use error::{Error, Result};
pub use hermitian::HermitianOperator;
pub use pointer::{effective_params, pointer_kernel, EffectiveParams, GaussianPointer};
pub use scalar::{CMatrix, Real};
pub use spectral::{spectral_decompose, SpectralDecomposition};

pub use num_complex::Complex;

pub type Hermitian64 = HermitianOperator<f64>;
pub type Density64 = DensityMatrix<f64>;
pub type Spectral64 = SpectralDecomposition<f64>;
pub type Protocol64 = Protocol<f64>;
pub type Pointer64 = GaussianPointer<f64>;
pub type CMatrix64 = CMatrix<f64>;
pub type C64 = Complex<f64>;

pub type Hermitian32 = HermitianOperator<f32>;
pub type Density32 = DensityMatrix<f32>;
pub type Pointer32 = GaussianPointer<f32>;
