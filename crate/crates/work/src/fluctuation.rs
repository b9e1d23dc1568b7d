//! Time-reversed protocols and the Crooks and Jarzynski relations, plain
//! and with the Gaussian-pointer correction.

use qwork_core::error::{Error, Result};
use qwork_core::scalar::{lit, to_f64, tol, Real};
use qwork_core::{DensityMatrix, GaussianPointer, Protocol, SpectralDecomposition};
use serde::Serialize;

use crate::amplitude::WorkInstance;
use crate::distributions::{pem_work_pdf_on, work_meter_pdf_on};
use crate::mixture::{AtomDistribution, GaussianMixture};
use crate::quadrature::Quadrature;

/// Time-reversed protocol `H(τ) → H(0)`.
///
/// An explicit backward propagator is used when present. Otherwise the
/// segments are replayed in reverse order without complex conjugation,
/// which is the time reversal only for real Hamiltonians.
pub fn build_backward<T: Real>(p: &Protocol<T>) -> Result<Protocol<T>> {
    let (h0, ht) = (p.initial_hamiltonian().clone(), p.final_hamiltonian().clone());
    if let Some(back) = p.backward_propagator() {
        return Protocol::with_propagator(ht, h0, back.clone(), Some(p.propagator().clone()));
    }
    let schedule = p.schedule().ok_or_else(|| {
        Error::Unsupported("protocol has neither a schedule nor an explicit backward propagator".into())
    })?;
    if schedule.segments().iter().any(|s| !s.hamiltonian.is_real()) {
        log::warn!("reversing a schedule with complex Hamiltonians without antiunitary conjugation");
    }
    Protocol::from_schedule(ht, h0, schedule.reversed())
}

/// `ln Σ_n d_n e^{-β e_n}`.
pub fn log_partition<T: Real>(d: &SpectralDecomposition<T>, beta: T) -> T {
    let e0 = d.eigenvalue(0);
    let s = d
        .eigenvalues()
        .iter()
        .zip(d.degeneracies())
        .fold(T::zero(), |a, (&e, &g)| a + lit::<T>(g as f64) * (-(beta * (e - e0))).exp());
    -(beta * e0) + s.ln()
}

/// `β ΔF = -ln(Z(τ)/Z(0))`, finite also at `β = 0`.
pub fn beta_delta_f<T: Real>(d0: &SpectralDecomposition<T>, dt: &SpectralDecomposition<T>, beta: T) -> T {
    log_partition(d0, beta) - log_partition(dt, beta)
}

/// Checks `Tr Π_n ρ = d_n e^{-β e_n}/Z` for every level.
pub fn check_boltzmann_diagonal<T: Real>(d: &SpectralDecomposition<T>, rho: &DensityMatrix<T>, beta: T) -> Result<()> {
    let lz = log_partition(d, beta);
    for (n, pop) in d.populations(rho.matrix()).into_iter().enumerate() {
        let want = lit::<T>(d.degeneracies()[n] as f64) * (-(beta * d.eigenvalue(n)) - lz).exp();
        if (pop - want).abs() > tol::<T>(1e-10) {
            return Err(Error::Validation(format!(
                "diagonal element Tr Pi_{n} rho = {pop} differs from the Boltzmann weight {want} (level e_{n} = {})",
                d.eigenvalue(n)
            )));
        }
    }
    Ok(())
}

/// Forward and backward processes started in Boltzmann-diagonal states.
#[derive(Clone, Debug)]
pub struct ProcessPair<T: Real> {
    pub forward: Protocol<T>,
    pub forward_state: DensityMatrix<T>,
    pub backward: Protocol<T>,
    pub backward_state: DensityMatrix<T>,
    pub beta: T,
    /// `β ΔF`.
    pub beta_delta_f: T,
}

impl<T: Real> ProcessPair<T> {
    pub fn new(
        forward: Protocol<T>,
        forward_state: DensityMatrix<T>,
        backward: Protocol<T>,
        backward_state: DensityMatrix<T>,
        beta: T,
    ) -> Result<Self> {
        if !(beta >= T::zero()) || !beta.is_finite() {
            return Err(Error::Validation(format!("beta must be finite and non-negative, got {beta}")));
        }
        let (d0, dt) = forward.decompose()?;
        check_boltzmann_diagonal(&d0, &forward_state, beta)
            .map_err(|e| Error::Validation(format!("forward initial state: {e}")))?;
        check_boltzmann_diagonal(&dt, &backward_state, beta)
            .map_err(|e| Error::Validation(format!("backward initial state: {e}")))?;
        Ok(Self {
            beta_delta_f: beta_delta_f(&d0, &dt, beta),
            forward,
            forward_state,
            backward,
            backward_state,
            beta,
        })
    }

    /// Canonical states of `H(0)` and `H(τ)` with the reversed protocol.
    pub fn canonical(forward: Protocol<T>, beta: T) -> Result<Self> {
        let backward = build_backward(&forward)?;
        let rf = DensityMatrix::canonical(forward.initial_hamiltonian(), beta)?;
        let rb = DensityMatrix::canonical(backward.initial_hamiltonian(), beta)?;
        Self::new(forward, rf, backward, rb, beta)
    }

    /// `ΔF`; requires `β > 0`.
    pub fn delta_f(&self) -> T {
        self.beta_delta_f / self.beta
    }
}

/// Outcome of one relation check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FluctuationReport {
    pub relation: String,
    pub max_violation: f64,
    /// Work values at which the relation was tested.
    pub grid: Vec<f64>,
    pub threshold: f64,
    pub pass: bool,
}

fn relative<T: Real>(a: T, b: T) -> T {
    let scale = a.abs().max(b.abs()).max(lit(1e-12));
    (a - b).abs() / scale
}

/// Largest relative violation of `p_F(w) = e^{βw - βΔF} p_B(-w)` over the
/// atoms of both distributions.
pub fn crooks_violation<T: Real>(
    forward: &AtomDistribution<T>,
    backward: &AtomDistribution<T>,
    beta: T,
    beta_delta_f: T,
    merge_tol: T,
) -> (T, Vec<T>) {
    let mut worst = T::zero();
    let mut grid = Vec::new();
    for &(w, pf) in &forward.atoms {
        let pb = backward.weight_at(-w, merge_tol);
        worst = worst.max(relative(pf, (beta * w - beta_delta_f).exp() * pb));
        grid.push(w);
    }
    for &(wb, pb) in &backward.atoms {
        let w = -wb;
        if grid.iter().all(|&g| (g - w).abs() > merge_tol) {
            worst = worst.max(relative(T::zero(), (beta * w - beta_delta_f).exp() * pb));
            grid.push(w);
        }
    }
    (worst, grid)
}

/// Projective Crooks relation, atom by atom, threshold `1e-9` relative.
pub fn crooks_check<T: Real>(pair: &ProcessPair<T>) -> Result<FluctuationReport> {
    let f = WorkInstance::new(&pair.forward, &pair.forward_state)?;
    let b = WorkInstance::new(&pair.backward, &pair.backward_state)?;
    let merge = crate::channels::atom_tolerance(f.spectral_scale());
    let (worst, grid) = crooks_violation(&pem_work_pdf_on(&f), &pem_work_pdf_on(&b), pair.beta, pair.beta_delta_f, merge);
    let threshold = 1e-9;
    Ok(FluctuationReport {
        relation: "crooks".into(),
        max_violation: to_f64(worst),
        grid: grid.into_iter().map(to_f64).collect(),
        threshold,
        pass: to_f64(worst) <= threshold,
    })
}

/// Largest relative violation of
/// `p_F(w - σ²β/2) = e^{βw - βΔF} p_B(-w - σ²β/2)` on the union of windows
/// `c + σ²β/2 ± 6σ` over the forward centers `c`.
pub fn modified_crooks_violation<T: Real>(
    forward: &GaussianMixture<T>,
    backward: &GaussianMixture<T>,
    beta: T,
    beta_delta_f: T,
    variance: T,
) -> (T, Vec<T>) {
    let sigma = variance.sqrt();
    let shift = variance * beta * lit(0.5);
    let centers: Vec<T> = forward.centers().into_iter().map(|c| c + shift).collect();
    let q = Quadrature::around(&centers, lit::<T>(6.0) * sigma, sigma / lit(8.0));
    let mut worst = T::zero();
    for &w in &q.nodes {
        let lhs = forward.evaluate(w - shift);
        let rhs = (beta * w - beta_delta_f).exp() * backward.evaluate(-w - shift);
        let scale = lhs.abs().max(rhs.abs()).max(lit(1e-30));
        worst = worst.max((lhs - rhs).abs() / scale);
    }
    (worst, q.nodes)
}

fn require_stationary<T: Real>(p: &Protocol<T>, rho: &DensityMatrix<T>, label: &str) -> Result<()> {
    let h = p.initial_hamiltonian();
    let scale = T::one() + qwork_core::matrix::max_abs(h.matrix());
    let defect = rho.commutator_defect(h);
    if defect > tol::<T>(1e-10) * scale {
        return Err(Error::Validation(format!(
            "{label} state does not commute with its initial Hamiltonian (defect {defect}); \
             the modified Crooks relation needs canonical states"
        )));
    }
    Ok(())
}

/// Modified Crooks relation for the diagonal-case work-meter pdf, threshold
/// `1e-8` relative.
pub fn modified_crooks_check<T: Real>(pair: &ProcessPair<T>, sigma_e2: T) -> Result<FluctuationReport> {
    require_stationary(&pair.forward, &pair.forward_state, "forward")?;
    require_stationary(&pair.backward, &pair.backward_state, "backward")?;
    let ptr = GaussianPointer::pure_with_sigma_e2(sigma_e2)?;
    let f = work_meter_pdf_on(&WorkInstance::new(&pair.forward, &pair.forward_state)?, &ptr);
    let b = work_meter_pdf_on(&WorkInstance::new(&pair.backward, &pair.backward_state)?, &ptr);
    let (worst, grid) = modified_crooks_violation(&f, &b, pair.beta, pair.beta_delta_f, sigma_e2);
    let threshold = 1e-8;
    Ok(FluctuationReport {
        relation: "modified_crooks".into(),
        max_violation: to_f64(worst),
        grid: grid.into_iter().map(to_f64).collect(),
        threshold,
        pass: to_f64(worst) <= threshold,
    })
}

/// Both sides of `⟨e^{-βw}⟩ = e^{-βΔF} e^{β²σ_e²/2}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct JarzynskiResult {
    pub lhs: f64,
    pub rhs: f64,
    /// `|lhs/rhs - 1|`, computed from the logarithms.
    pub ratio_deviation: f64,
    pub log_lhs: f64,
    pub log_rhs: f64,
}

impl JarzynskiResult {
    pub fn to_report(&self, threshold: f64) -> FluctuationReport {
        FluctuationReport {
            relation: "modified_jarzynski".into(),
            max_violation: self.ratio_deviation,
            grid: Vec::new(),
            threshold,
            pass: self.ratio_deviation <= threshold,
        }
    }
}

/// Work-meter exponential average against the corrected Jarzynski value.
/// Only the Boltzmann diagonal of `rho` is required; coherences are kept
/// and show up as a violation.
pub fn modified_jarzynski<T: Real>(
    p: &Protocol<T>,
    ptr: &GaussianPointer<T>,
    rho: &DensityMatrix<T>,
    beta: T,
) -> Result<JarzynskiResult> {
    let inst = WorkInstance::new(p, rho)?;
    check_boltzmann_diagonal(inst.initial(), rho, beta)?;
    let log_lhs = work_meter_pdf_on(&inst, ptr).log_exp_moment(beta)?;
    let log_rhs = -beta_delta_f(inst.initial(), inst.final_spectrum(), beta) + beta * beta * ptr.sigma_e2() * lit(0.5);
    let diff = to_f64(log_lhs - log_rhs);
    Ok(JarzynskiResult {
        lhs: to_f64(log_lhs).exp(),
        rhs: to_f64(log_rhs).exp(),
        ratio_deviation: diff.exp_m1().abs(),
        log_lhs: to_f64(log_lhs),
        log_rhs: to_f64(log_rhs),
    })
}

/// Projective Jarzynski average `⟨e^{-βw}⟩_pem` against `e^{-βΔF}`.
pub fn jarzynski<T: Real>(p: &Protocol<T>, rho: &DensityMatrix<T>, beta: T) -> Result<JarzynskiResult> {
    let inst = WorkInstance::new(p, rho)?;
    check_boltzmann_diagonal(inst.initial(), rho, beta)?;
    let lhs = pem_work_pdf_on(&inst).exp_moment(beta);
    let log_lhs = to_f64(lhs.ln());
    let log_rhs = -to_f64(beta_delta_f(inst.initial(), inst.final_spectrum(), beta));
    Ok(JarzynskiResult {
        lhs: to_f64(lhs),
        rhs: log_rhs.exp(),
        ratio_deviation: (log_lhs - log_rhs).exp_m1().abs(),
        log_lhs,
        log_rhs,
    })
}
