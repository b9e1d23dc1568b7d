//! Force protocols: piecewise-constant Hamiltonian schedules, their
//! propagators, and the untouched-work average.

use crate::density::DensityMatrix;
use crate::error::{check_dim, Error, Result};
use crate::hermitian::HermitianOperator;
use crate::matrix::{trace_product, unitarity_defect};
use crate::scalar::{cis, tol, CMatrix, Real};
use crate::spectral::SpectralDecomposition;

/// `exp(-i H t / ħ)` through the unitary diagonalization of `H`.
pub fn evolution_operator<T: Real>(h: &HermitianOperator<T>, duration: T, hbar: T) -> Result<CMatrix<T>> {
    let d = SpectralDecomposition::new(h, Some(T::zero()))?;
    Ok(d.apply_function(|e| cis(-(e * duration / hbar))))
}

#[derive(Clone, Debug)]
pub struct Segment<T: Real> {
    pub hamiltonian: HermitianOperator<T>,
    pub duration: T,
}

/// Ordered list of constant-Hamiltonian segments.
#[derive(Clone, Debug)]
pub struct Schedule<T: Real> {
    segments: Vec<Segment<T>>,
    hbar: T,
}

impl<T: Real> Schedule<T> {
    pub fn new(segments: Vec<Segment<T>>, hbar: T) -> Result<Self> {
        if !(hbar > T::zero()) {
            return Err(Error::Validation(format!("hbar must be positive, got {hbar}")));
        }
        for (k, s) in segments.iter().enumerate() {
            if !(s.duration > T::zero()) || !s.duration.is_finite() {
                return Err(Error::Validation(format!(
                    "segment {k} has non-positive duration {}",
                    s.duration
                )));
            }
            check_dim(segments[0].hamiltonian.dim(), s.hamiltonian.dim())?;
        }
        Ok(Self { segments, hbar })
    }

    /// A schedule with no segments: the sudden quench.
    pub fn empty(hbar: T) -> Self {
        Self { segments: Vec::new(), hbar }
    }

    pub fn segments(&self) -> &[Segment<T>] {
        &self.segments
    }

    pub fn hbar(&self) -> T {
        self.hbar
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    /// Same segments traversed in reverse order.
    pub fn reversed(&self) -> Self {
        Self {
            segments: self.segments.iter().rev().cloned().collect(),
            hbar: self.hbar,
        }
    }

    /// Product of segment propagators, later segments on the left. The empty
    /// schedule gives the identity.
    pub fn propagator(&self, dim: usize) -> Result<CMatrix<T>> {
        let mut u = CMatrix::<T>::identity(dim, dim);
        for s in &self.segments {
            check_dim(dim, s.hamiltonian.dim())?;
            u = evolution_operator(&s.hamiltonian, s.duration, self.hbar)? * u;
        }
        Ok(u)
    }
}

/// Free-function form of [`Schedule::propagator`].
pub fn propagator_from_schedule<T: Real>(s: &Schedule<T>, dim: usize) -> Result<CMatrix<T>> {
    s.propagator(dim)
}

/// Initial and final Hamiltonians with the unitary connecting them.
#[derive(Clone, Debug)]
pub struct Protocol<T: Real> {
    initial: HermitianOperator<T>,
    final_hamiltonian: HermitianOperator<T>,
    propagator: CMatrix<T>,
    schedule: Option<Schedule<T>>,
    backward_propagator: Option<CMatrix<T>>,
}

impl<T: Real> Protocol<T> {
    /// Instantaneous switch `H_i → H_f`: the propagator is the identity.
    pub fn sudden(initial: HermitianOperator<T>, final_hamiltonian: HermitianOperator<T>) -> Result<Self> {
        let hbar = T::one();
        Self::from_schedule(initial, final_hamiltonian, Schedule::empty(hbar))
    }

    pub fn from_schedule(
        initial: HermitianOperator<T>,
        final_hamiltonian: HermitianOperator<T>,
        schedule: Schedule<T>,
    ) -> Result<Self> {
        check_dim(initial.dim(), final_hamiltonian.dim())?;
        let propagator = schedule.propagator(initial.dim())?;
        Ok(Self {
            initial,
            final_hamiltonian,
            propagator,
            schedule: Some(schedule),
            backward_propagator: None,
        })
    }

    /// Explicit propagator, optionally with the propagator of the
    /// time-reversed protocol. Unitarity is checked to `1e-10`.
    pub fn with_propagator(
        initial: HermitianOperator<T>,
        final_hamiltonian: HermitianOperator<T>,
        propagator: CMatrix<T>,
        backward: Option<CMatrix<T>>,
    ) -> Result<Self> {
        let n = initial.dim();
        check_dim(n, final_hamiltonian.dim())?;
        for u in std::iter::once(&propagator).chain(backward.iter()) {
            check_dim(n, u.nrows())?;
            check_dim(n, u.ncols())?;
            let defect = unitarity_defect(u);
            if defect > tol::<T>(1e-10) {
                return Err(Error::Validation(format!("propagator is not unitary (defect {defect})")));
            }
        }
        Ok(Self {
            initial,
            final_hamiltonian,
            propagator,
            schedule: None,
            backward_propagator: backward,
        })
    }

    pub fn dim(&self) -> usize {
        self.initial.dim()
    }

    pub fn initial_hamiltonian(&self) -> &HermitianOperator<T> {
        &self.initial
    }

    pub fn final_hamiltonian(&self) -> &HermitianOperator<T> {
        &self.final_hamiltonian
    }

    pub fn propagator(&self) -> &CMatrix<T> {
        &self.propagator
    }

    pub fn schedule(&self) -> Option<&Schedule<T>> {
        self.schedule.as_ref()
    }

    pub fn backward_propagator(&self) -> Option<&CMatrix<T>> {
        self.backward_propagator.as_ref()
    }

    /// Spectral decompositions of `H(0)` and `H(τ)`.
    pub fn decompose(&self) -> Result<(SpectralDecomposition<T>, SpectralDecomposition<T>)> {
        Ok((
            SpectralDecomposition::new(&self.initial, None)?,
            SpectralDecomposition::new(&self.final_hamiltonian, None)?,
        ))
    }

    /// `Tr U† H(τ) U ρ - Tr H(0) ρ`.
    pub fn untouched_average_work(&self, rho: &DensityMatrix<T>) -> Result<T> {
        untouched_average_work(self, rho)
    }
}

/// Difference of final and initial energy expectations with no measurement
/// back-action: `Tr U† H(τ) U ρ - Tr H(0) ρ`.
pub fn untouched_average_work<T: Real>(p: &Protocol<T>, rho: &DensityMatrix<T>) -> Result<T> {
    check_dim(p.dim(), rho.dim())?;
    let u = p.propagator();
    let heisenberg = u.adjoint() * p.final_hamiltonian().matrix() * u;
    let w = trace_product(&heisenberg, rho.matrix()) - trace_product(p.initial_hamiltonian().matrix(), rho.matrix());
    let scale = T::one() + w.re.abs();
    if w.im.abs() > tol::<T>(1e-10) * scale {
        return Err(Error::Numeric(format!("untouched work has imaginary residue {}", w.im)));
    }
    Ok(w.re)
}
