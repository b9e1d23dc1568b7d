//! Outcome-resolved operations `Φ_w(ρ)` and non-selective post-measurement
//! states for projective, Gaussian-pointer and work-meter measurements.

use num_complex::Complex;
use qwork_core::error::{Error, Result};
use qwork_core::matrix::{hermitian_part, min_eigenvalue};
use qwork_core::scalar::{cexp, lit, tol, CMatrix, Real};
use qwork_core::{DensityMatrix, GaussianPointer, Protocol, SpectralDecomposition};

use crate::amplitude::WorkInstance;
use crate::quadrature::Quadrature;

/// Non-normalized post-measurement state for one outcome value.
#[derive(Clone, Debug, PartialEq)]
pub struct OutcomeOperator<T: Real> {
    pub outcome: T,
    pub matrix: CMatrix<T>,
}

impl<T: Real> OutcomeOperator<T> {
    pub fn trace(&self) -> T {
        self.matrix.trace().re
    }

    pub fn min_eigenvalue(&self) -> T {
        min_eigenvalue(&self.matrix).unwrap_or(T::zero())
    }

    /// Hermitian, PSD to `-1e-10` and trace at most `1 + 1e-10`. For a
    /// discrete outcome the trace is a probability.
    pub fn validate(&self) -> Result<()> {
        self.validate_density()?;
        let t = self.trace();
        if t > T::one() + tol::<T>(1e-10) {
            return Err(Error::Numeric(format!("outcome operator has trace {t} > 1")));
        }
        Ok(())
    }

    /// Hermitian and PSD to `-1e-10`. For a continuous outcome the trace is a
    /// probability density and is not bounded by one; contractivity applies
    /// to integrals over outcome sets.
    pub fn validate_density(&self) -> Result<()> {
        let defect = qwork_core::matrix::hermiticity_defect(&self.matrix);
        if defect > tol::<T>(1e-10) {
            return Err(Error::Numeric(format!("outcome operator not Hermitian ({defect})")));
        }
        let lam = self.min_eigenvalue();
        if lam < -tol::<T>(1e-10) {
            return Err(Error::Numeric(format!("outcome operator has eigenvalue {lam}")));
        }
        Ok(())
    }

    /// Selective state `Φ(ρ) / Tr Φ(ρ)`, `None` below probability `1e-14`.
    pub fn selective_state(&self) -> Option<CMatrix<T>> {
        let t = self.trace();
        (t > lit(1e-14)).then(|| self.matrix.map(|z| z / Complex::new(t, T::zero())))
    }
}

fn complex_gaussian<T: Real>(x: T, log_prefactor: T, center: Complex<T>, variance: T) -> Complex<T> {
    let d = Complex::new(x, T::zero()) - center;
    let norm = (T::two_pi() * variance).sqrt().recip();
    cexp(Complex::new(-log_prefactor, T::zero()) - d * d / Complex::new(lit::<T>(2.0) * variance, T::zero())) * norm
}

/// Tolerance for identifying two work values.
pub fn atom_tolerance<T: Real>(scale: T) -> T {
    lit::<T>(1e-8) * scale
}

/// Projective scheme: `Σ_{w_{mn} = w} K_{mn} ρ K_{mn}†`.
pub fn pem_operation<T: Real>(p: &Protocol<T>, rho: &DensityMatrix<T>, w: T) -> Result<OutcomeOperator<T>> {
    let inst = WorkInstance::new(p, rho)?;
    Ok(pem_operation_on(&inst, w))
}

pub fn pem_operation_on<T: Real>(inst: &WorkInstance<T>, w: T) -> OutcomeOperator<T> {
    let n = inst.dim();
    let t = atom_tolerance(inst.spectral_scale());
    let mut out = CMatrix::zeros(n, n);
    for m in 0..inst.final_levels() {
        for k in 0..inst.initial_levels() {
            if (inst.work_value(m, k) - w).abs() <= t {
                out += inst.term(m, k, m, k);
            }
        }
    }
    OutcomeOperator {
        outcome: w,
        matrix: hermitian_part(&out),
    }
}

/// Lüders state `Σ_{m,n} K_{mn} ρ K_{mn}†`.
pub fn pem_nonselective<T: Real>(p: &Protocol<T>, rho: &DensityMatrix<T>) -> Result<DensityMatrix<T>> {
    let inst = WorkInstance::new(p, rho)?;
    pem_nonselective_on(&inst)
}

pub fn pem_nonselective_on<T: Real>(inst: &WorkInstance<T>) -> Result<DensityMatrix<T>> {
    let n = inst.dim();
    let mut out = CMatrix::zeros(n, n);
    for m in 0..inst.final_levels() {
        for k in 0..inst.initial_levels() {
            out += inst.term(m, k, m, k);
        }
    }
    DensityMatrix::new(hermitian_part(&out))
}

/// Single Gaussian-pointer energy measurement: each pair of levels
/// contributes `exp(-Δe²/(2σ_nd²)) N(E; A - i s Δe/(2ħ), σ_e²) Π_n ρ Π_{n'}`
/// with `A` the mean energy of the pair and `s = ⟨{X,P}⟩`.
pub fn gaussian_energy_operation<T: Real>(
    d: &SpectralDecomposition<T>,
    ptr: &GaussianPointer<T>,
    rho: &DensityMatrix<T>,
    energy: T,
) -> Result<OutcomeOperator<T>> {
    check(d.dim(), rho.dim())?;
    let e = ptr.effective_params();
    let two: T = lit(2.0);
    let shift = ptr.sym_xp() / (two * ptr.hbar());
    let mut out = CMatrix::zeros(d.dim(), d.dim());
    for (n, pn) in d.projectors().iter().enumerate() {
        let left = pn * rho.matrix();
        for (np, pnp) in d.projectors().iter().enumerate() {
            let (a, b) = (d.eigenvalue(n), d.eigenvalue(np));
            let delta = a - b;
            let center = Complex::new((a + b) / two, -shift * delta);
            let g = complex_gaussian(energy, delta * delta / (two * e.sigma_nd2), center, e.sigma_e2);
            out += &left * pnp * g;
        }
    }
    Ok(OutcomeOperator {
        outcome: energy,
        matrix: hermitian_part(&out),
    })
}

/// Non-selective state of one Gaussian energy measurement.
pub fn gaussian_energy_nonselective<T: Real>(
    d: &SpectralDecomposition<T>,
    ptr: &GaussianPointer<T>,
    rho: &DensityMatrix<T>,
) -> Result<DensityMatrix<T>> {
    check(d.dim(), rho.dim())?;
    let nd2 = ptr.sigma_nd2();
    let mut out = CMatrix::zeros(d.dim(), d.dim());
    for (n, pn) in d.projectors().iter().enumerate() {
        for (np, pnp) in d.projectors().iter().enumerate() {
            let delta = d.eigenvalue(n) - d.eigenvalue(np);
            let s = (-(delta * delta) / (lit::<T>(2.0) * nd2)).exp();
            out += pn * rho.matrix() * pnp * Complex::new(s, T::zero());
        }
    }
    DensityMatrix::new(hermitian_part(&out))
}

/// `M_E ρ M_E†` with `M_E = (2πσ_e²)^{-1/4} exp(-(E - H)²/(4σ_e²))`.
pub fn kraus_energy_operation<T: Real>(
    d: &SpectralDecomposition<T>,
    sigma_e2: T,
    rho: &DensityMatrix<T>,
    energy: T,
) -> Result<OutcomeOperator<T>> {
    check(d.dim(), rho.dim())?;
    if !(sigma_e2 > T::zero()) {
        return Err(Error::Validation(format!("sigma_e2 must be positive, got {sigma_e2}")));
    }
    let norm = (T::two_pi() * sigma_e2).powf(lit(-0.25));
    let m = d.apply_function(|e| {
        let x = energy - e;
        Complex::new(norm * (-(x * x) / (lit::<T>(4.0) * sigma_e2)).exp(), T::zero())
    });
    Ok(OutcomeOperator {
        outcome: energy,
        matrix: hermitian_part(&(&m * rho.matrix() * m.adjoint())),
    })
}

fn check(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// Which Gaussian work scheme a [`GaussianWorkChannel`] realizes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GaussianScheme {
    /// One pointer coupled before and after the protocol, read once.
    WorkMeter,
    /// Two independent Gaussian energy measurements.
    TwoGaussian,
}

#[derive(Clone, Debug)]
struct PairTerm<T: Real> {
    log_suppression: T,
    center: Complex<T>,
    matrix: CMatrix<T>,
}

/// Precomputed level-tuple terms `K_{mn} ρ K_{m'n'}†` with their
/// suppression factors and complex Gaussian centers.
#[derive(Clone, Debug)]
pub struct GaussianWorkChannel<T: Real> {
    scheme: GaussianScheme,
    variance: T,
    dim: usize,
    terms: Vec<PairTerm<T>>,
}

impl<T: Real> GaussianWorkChannel<T> {
    pub fn new(inst: &WorkInstance<T>, ptr: &GaussianPointer<T>, scheme: GaussianScheme) -> Self {
        let e = ptr.effective_params();
        let two: T = lit(2.0);
        let shift = ptr.sym_xp() / (two * ptr.hbar());
        let (lt, l0) = (inst.final_levels(), inst.initial_levels());
        let pairs: Vec<(usize, usize)> = (0..lt).flat_map(|m| (0..l0).map(move |n| (m, n))).collect();
        let left: Vec<CMatrix<T>> = pairs
            .iter()
            .map(|&(m, n)| inst.block(m, n) * inst.state().matrix())
            .collect();
        let mut terms = Vec::with_capacity(pairs.len() * pairs.len());
        for (j, &(m, n)) in pairs.iter().enumerate() {
            for &(mp, np) in &pairs {
                let w1 = inst.work_value(m, n);
                let w2 = inst.work_value(mp, np);
                let exponent = match scheme {
                    GaussianScheme::WorkMeter => (w1 - w2) * (w1 - w2),
                    GaussianScheme::TwoGaussian => {
                        let dt = inst.final_spectrum().eigenvalue(m) - inst.final_spectrum().eigenvalue(mp);
                        let d0 = inst.initial().eigenvalue(n) - inst.initial().eigenvalue(np);
                        dt * dt + d0 * d0
                    }
                };
                terms.push(PairTerm {
                    log_suppression: exponent / (two * e.sigma_nd2),
                    center: Complex::new((w1 + w2) / two, -shift * (w1 - w2)),
                    matrix: &left[j] * inst.block(mp, np).adjoint(),
                });
            }
        }
        let variance = match scheme {
            GaussianScheme::WorkMeter => e.sigma_e2,
            GaussianScheme::TwoGaussian => two * e.sigma_e2,
        };
        Self {
            scheme,
            variance,
            dim: inst.dim(),
            terms,
        }
    }

    pub fn scheme(&self) -> GaussianScheme {
        self.scheme
    }

    /// Variance of each Gaussian in `w`.
    pub fn variance(&self) -> T {
        self.variance
    }

    /// Real parts of all Gaussian centers.
    pub fn centers(&self) -> Vec<T> {
        self.terms.iter().map(|t| t.center.re).collect()
    }

    pub fn operation(&self, w: T) -> OutcomeOperator<T> {
        let mut out = CMatrix::zeros(self.dim, self.dim);
        for t in &self.terms {
            let g = complex_gaussian(w, t.log_suppression, t.center, self.variance);
            if g.re != T::zero() || g.im != T::zero() {
                out += &t.matrix * g;
            }
        }
        OutcomeOperator {
            outcome: w,
            matrix: hermitian_part(&out),
        }
    }

    /// `Tr Φ_w(ρ)` without forming the operator.
    pub fn outcome_density(&self, w: T) -> T {
        self.terms.iter().fold(T::zero(), |acc, t| {
            let g = complex_gaussian(w, t.log_suppression, t.center, self.variance);
            acc + (t.matrix.trace() * g).re
        })
    }

    /// `∫ Φ_w(ρ) dw`: the suppression-weighted sum of all terms.
    pub fn nonselective(&self) -> Result<DensityMatrix<T>> {
        let mut out = CMatrix::zeros(self.dim, self.dim);
        for t in &self.terms {
            let s = (-t.log_suppression).exp();
            if s > T::zero() {
                out += &t.matrix * Complex::new(s, T::zero());
            }
        }
        DensityMatrix::new(hermitian_part(&out))
    }

    /// Quadrature covering every center by `±8 max(σ_e, √2 σ_e)` at spacing
    /// `σ_e/20`.
    pub fn outcome_quadrature(&self) -> Quadrature<T> {
        let sigma_e = match self.scheme {
            GaussianScheme::WorkMeter => self.variance.sqrt(),
            GaussianScheme::TwoGaussian => (self.variance / lit(2.0)).sqrt(),
        };
        let reach = lit::<T>(8.0) * sigma_e * lit::<T>(2.0).sqrt();
        Quadrature::around(&self.centers(), reach, sigma_e / lit(20.0))
    }

    /// Quadrature of `Tr Φ_w(ρ)` over the outcome axis.
    pub fn integrated_trace(&self) -> T {
        self.outcome_quadrature().integrate(|w| self.outcome_density(w))
    }
}

pub fn work_meter_operation<T: Real>(
    p: &Protocol<T>,
    ptr: &GaussianPointer<T>,
    rho: &DensityMatrix<T>,
    w: T,
) -> Result<OutcomeOperator<T>> {
    let inst = WorkInstance::new(p, rho)?;
    Ok(GaussianWorkChannel::new(&inst, ptr, GaussianScheme::WorkMeter).operation(w))
}

/// `Σ exp(-(w_{mn} - w_{m'n'})²/(2σ_nd²)) K_{mn} ρ K_{m'n'}†`.
pub fn work_meter_nonselective<T: Real>(
    p: &Protocol<T>,
    ptr: &GaussianPointer<T>,
    rho: &DensityMatrix<T>,
) -> Result<DensityMatrix<T>> {
    let inst = WorkInstance::new(p, rho)?;
    nonselective_direct(&inst, ptr, GaussianScheme::WorkMeter)
}

pub fn two_gaussian_work_operation<T: Real>(
    p: &Protocol<T>,
    ptr: &GaussianPointer<T>,
    rho: &DensityMatrix<T>,
    w: T,
) -> Result<OutcomeOperator<T>> {
    let inst = WorkInstance::new(p, rho)?;
    Ok(GaussianWorkChannel::new(&inst, ptr, GaussianScheme::TwoGaussian).operation(w))
}

/// `Σ exp(-[(Δe_τ)² + (Δe_0)²]/(2σ_nd²)) K_{mn} ρ K_{m'n'}†`.
pub fn two_gaussian_nonselective<T: Real>(
    p: &Protocol<T>,
    ptr: &GaussianPointer<T>,
    rho: &DensityMatrix<T>,
) -> Result<DensityMatrix<T>> {
    let inst = WorkInstance::new(p, rho)?;
    nonselective_direct(&inst, ptr, GaussianScheme::TwoGaussian)
}

fn nonselective_direct<T: Real>(
    inst: &WorkInstance<T>,
    ptr: &GaussianPointer<T>,
    scheme: GaussianScheme,
) -> Result<DensityMatrix<T>> {
    GaussianWorkChannel::new(inst, ptr, scheme).nonselective()
}
