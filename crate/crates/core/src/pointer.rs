//! Gaussian von Neumann pointer with vanishing first moments.
//!
//! The pointer state is fixed by its second moments `⟨X²⟩`, `⟨P²⟩` and the
//! symmetrized correlation `⟨{X,P}⟩`; together with the effective coupling
//! `κ` they determine the two precision parameters
//!
//! * `σ_e² = ⟨X²⟩ / κ²`: broadening of every energy or work peak,
//! * `σ_nd² = ħ² / (κ² ⟨P²⟩)`: survival scale of energy coherences,
//!
//! and the complex weight `α = (1 - i⟨{X,P}⟩/ħ) / 2`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{cexp, lit, tol, Real};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianPointer<T: Real> {
    var_x: T,
    var_p: T,
    sym_xp: T,
    kappa: T,
    hbar: T,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EffectiveParams<T: Real> {
    pub sigma_e2: T,
    pub sigma_nd2: T,
    pub alpha: Complex<T>,
}

impl<T: Real> GaussianPointer<T> {
    /// Rejects moment sets violating `⟨X²⟩⟨P²⟩ ≥ (ħ² + ⟨{X,P}⟩²)/4`.
    pub fn new(var_x: T, var_p: T, sym_xp: T, kappa: T, hbar: T) -> Result<Self> {
        for (name, v) in [("var_x", var_x), ("var_p", var_p), ("kappa", kappa), ("hbar", hbar)] {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(Error::Validation(format!("{name} must be positive and finite, got {v}")));
            }
        }
        if !sym_xp.is_finite() {
            return Err(Error::Validation("sym_xp must be finite".into()));
        }
        let lhs = var_x * var_p;
        let rhs = (hbar * hbar + sym_xp * sym_xp) / lit(4.0);
        if lhs < rhs - tol::<T>(1e-12) * (T::one() + rhs) {
            return Err(Error::Validation(format!(
                "pointer state violates positivity: <X^2><P^2> = {lhs} < (hbar^2 + <{{X,P}}>^2)/4 = {rhs}"
            )));
        }
        Ok(Self {
            var_x,
            var_p,
            sym_xp,
            kappa,
            hbar,
        })
    }

    /// Minimum-uncertainty state `ψ(x) ∝ exp(-x²/(4⟨X²⟩))`.
    pub fn pure(var_x: T, kappa: T, hbar: T) -> Result<Self> {
        Self::new(var_x, hbar * hbar / (lit::<T>(4.0) * var_x), T::zero(), kappa, hbar)
    }

    /// Pure pointer with `κ = ħ = 1` and the requested `σ_e²`.
    pub fn pure_with_sigma_e2(sigma_e2: T) -> Result<Self> {
        Self::pure(sigma_e2, T::one(), T::one())
    }

    pub fn var_x(&self) -> T {
        self.var_x
    }

    pub fn var_p(&self) -> T {
        self.var_p
    }

    pub fn sym_xp(&self) -> T {
        self.sym_xp
    }

    pub fn kappa(&self) -> T {
        self.kappa
    }

    pub fn hbar(&self) -> T {
        self.hbar
    }

    /// Same state with a different coupling.
    pub fn with_kappa(&self, kappa: T) -> Result<Self> {
        Self::new(self.var_x, self.var_p, self.sym_xp, kappa, self.hbar)
    }

    pub fn sigma_e2(&self) -> T {
        self.var_x / (self.kappa * self.kappa)
    }

    pub fn sigma_nd2(&self) -> T {
        self.hbar * self.hbar / (self.kappa * self.kappa * self.var_p)
    }

    pub fn alpha(&self) -> Complex<T> {
        let half = lit::<T>(0.5);
        Complex::new(half, -half * self.sym_xp / self.hbar)
    }

    pub fn effective_params(&self) -> EffectiveParams<T> {
        EffectiveParams {
            sigma_e2: self.sigma_e2(),
            sigma_nd2: self.sigma_nd2(),
            alpha: self.alpha(),
        }
    }

    /// `⟨X²⟩⟨P²⟩ = ħ²/4` within tolerance.
    pub fn is_pure(&self) -> bool {
        let target = self.hbar * self.hbar / lit(4.0);
        (self.var_x * self.var_p - target).abs() <= tol::<T>(1e-12) * target && self.sym_xp == T::zero()
    }

    /// Quadratic form `μ(x, y)` of the position-space kernel.
    pub fn mu(&self, x: T, y: T) -> Complex<T> {
        let two = lit::<T>(2.0);
        let d = x - y;
        let diag = self.var_p / (two * self.hbar * self.hbar) * d * d;
        let inner = Complex::new((x + y) / two, -self.sym_xp / (two * self.hbar) * d);
        Complex::new(diag, T::zero()) + inner * inner / (two * self.var_x)
    }

    /// Position-space density matrix `σ(x, y) = (2π⟨X²⟩)^{-1/2} e^{-μ(x,y)}`.
    pub fn kernel(&self, x: T, y: T) -> Complex<T> {
        let norm = (T::two_pi() * self.var_x).sqrt().recip();
        cexp(-self.mu(x, y)) * norm
    }

    /// `√(2π⟨X²⟩)^{-1/2} e^{-x²/(4⟨X²⟩)}`; meaningful for pure pointers.
    pub fn pure_wavefunction(&self, x: T) -> T {
        let norm = (T::two_pi() * self.var_x).powf(lit(-0.25));
        norm * (-(x * x) / (lit::<T>(4.0) * self.var_x)).exp()
    }
}

/// Free-function form of [`GaussianPointer::effective_params`].
pub fn effective_params<T: Real>(p: &GaussianPointer<T>) -> EffectiveParams<T> {
    p.effective_params()
}

/// Free-function form of [`GaussianPointer::kernel`].
pub fn pointer_kernel<T: Real>(p: &GaussianPointer<T>, x: T, y: T) -> Complex<T> {
    p.kernel(x, y)
}
