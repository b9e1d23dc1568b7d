//! Work distributions of every scheme built from the amplitude tensor.

use num_complex::Complex;
use qwork_core::error::{Error, Result};
use qwork_core::matrix::trace_product;
use qwork_core::scalar::{cis, lit, to_f64, Real};
use qwork_core::{DensityMatrix, GaussianPointer, Protocol, SpectralDecomposition};
use rustfft::FftPlanner;
use serde::Serialize;

use crate::amplitude::WorkInstance;
use crate::channels::atom_tolerance;
use crate::mixture::{AtomDistribution, GaussianMixture, Grid, MixtureTerm, Scheme};

/// Two projective energy measurements: atoms at `e_m(τ) - e_n(0)`.
pub fn pem_work_pdf<T: Real>(p: &Protocol<T>, rho: &DensityMatrix<T>) -> Result<AtomDistribution<T>> {
    Ok(pem_work_pdf_on(&WorkInstance::new(p, rho)?))
}

pub fn pem_work_pdf_on<T: Real>(inst: &WorkInstance<T>) -> AtomDistribution<T> {
    let jp = inst.joint_probability();
    let mut points = Vec::with_capacity(jp.len());
    for m in 0..inst.final_levels() {
        for n in 0..inst.initial_levels() {
            points.push((inst.work_value(m, n), jp[(m, n)]));
        }
    }
    AtomDistribution::from_points(Scheme::Pem, points, atom_tolerance(inst.spectral_scale()), false)
}

/// Terms `(m,n,n')` with weight `s_{nn'} p(m,n,n')` and center
/// `e_m - α e_n - α* e_{n'}`; `suppress` selects `s_{nn'} = exp(-Δe²/(2σ_nd²))`
/// or `s = 1`.
fn tensor_mixture<T: Real>(
    inst: &WorkInstance<T>,
    ptr: &GaussianPointer<T>,
    variance: T,
    suppress: bool,
    scheme: Scheme,
) -> GaussianMixture<T> {
    let e = ptr.effective_params();
    let t = inst.amplitude_tensor();
    let two: T = lit(2.0);
    let mut terms = Vec::new();
    for (m, n, np, amp) in t.iter() {
        let (a, b) = (inst.initial().eigenvalue(n), inst.initial().eigenvalue(np));
        let s = if suppress {
            (-(a - b) * (a - b) / (two * e.sigma_nd2)).exp()
        } else {
            T::one()
        };
        let weight = amp * s;
        if weight.re == T::zero() && weight.im == T::zero() {
            continue;
        }
        let em = Complex::new(inst.final_spectrum().eigenvalue(m), T::zero());
        let center = em - e.alpha * a - e.alpha.conj() * b;
        terms.push(MixtureTerm {
            weight,
            center,
            variance,
        });
    }
    GaussianMixture::new(scheme, terms, e.sigma_e2, suppress.then_some(e.sigma_nd2))
}

/// Work-meter pdf: variance `σ_e²` per term.
pub fn work_meter_pdf<T: Real>(
    p: &Protocol<T>,
    ptr: &GaussianPointer<T>,
    rho: &DensityMatrix<T>,
) -> Result<GaussianMixture<T>> {
    Ok(work_meter_pdf_on(&WorkInstance::new(p, rho)?, ptr))
}

pub fn work_meter_pdf_on<T: Real>(inst: &WorkInstance<T>, ptr: &GaussianPointer<T>) -> GaussianMixture<T> {
    tensor_mixture(inst, ptr, ptr.sigma_e2(), true, Scheme::WorkMeter)
}

/// Two Gaussian energy measurements: variance `2σ_e²` per term.
pub fn two_gaussian_work_pdf<T: Real>(
    p: &Protocol<T>,
    ptr: &GaussianPointer<T>,
    rho: &DensityMatrix<T>,
) -> Result<GaussianMixture<T>> {
    Ok(two_gaussian_work_pdf_on(&WorkInstance::new(p, rho)?, ptr))
}

pub fn two_gaussian_work_pdf_on<T: Real>(inst: &WorkInstance<T>, ptr: &GaussianPointer<T>) -> GaussianMixture<T> {
    tensor_mixture(inst, ptr, lit::<T>(2.0) * ptr.sigma_e2(), true, Scheme::TwoGaussian)
}

/// Imprecise limit: all coherences enter unsuppressed.
pub fn imprecise_limit_pdf<T: Real>(
    p: &Protocol<T>,
    ptr: &GaussianPointer<T>,
    rho: &DensityMatrix<T>,
) -> Result<GaussianMixture<T>> {
    Ok(imprecise_limit_pdf_on(&WorkInstance::new(p, rho)?, ptr))
}

pub fn imprecise_limit_pdf_on<T: Real>(inst: &WorkInstance<T>, ptr: &GaussianPointer<T>) -> GaussianMixture<T> {
    tensor_mixture(inst, ptr, ptr.sigma_e2(), false, Scheme::Imprecise)
}

/// Mean work of the work meter:
/// `Tr H(τ) U ρ̄ U† - Tr H(0) ρ + Σ_{n>n'} s_{nn'} Tr H(τ) U (Π_n ρ Π_{n'} + h.c.) U†`.
pub fn mean_work<T: Real>(p: &Protocol<T>, ptr: &GaussianPointer<T>, rho: &DensityMatrix<T>) -> Result<T> {
    Ok(mean_work_on(&WorkInstance::new(p, rho)?, ptr))
}

pub fn mean_work_on<T: Real>(inst: &WorkInstance<T>, ptr: &GaussianPointer<T>) -> T {
    let d0 = inst.initial();
    let u = inst.propagator();
    let heisenberg = u.adjoint() * inst.final_spectrum().reconstruct() * u;
    let r = inst.state().matrix();
    let h0 = d0.reconstruct();
    let mut w = trace_product(&heisenberg, &d0.pinch(r)).re - trace_product(&h0, r).re;
    let two: T = lit(2.0);
    let nd2 = ptr.sigma_nd2();
    for n in 0..d0.levels() {
        for np in 0..n {
            let delta = d0.eigenvalue(n) - d0.eigenvalue(np);
            let s = (-(delta * delta) / (two * nd2)).exp();
            if s == T::zero() {
                continue;
            }
            let block = d0.projector(n) * r * d0.projector(np);
            let coherent = &block + block.adjoint();
            w += s * trace_product(&heisenberg, &coherent).re;
        }
    }
    w
}

/// Characteristic function `G(u) = ∫ e^{iuw} p(w) dw` of a mixture.
#[derive(Clone, Debug)]
pub struct CharacteristicFunction<T: Real> {
    pub scheme: Scheme,
    mixture: GaussianMixture<T>,
}

impl<T: Real> CharacteristicFunction<T> {
    pub fn of(mixture: &GaussianMixture<T>) -> Self {
        Self {
            scheme: mixture.scheme,
            mixture: mixture.clone(),
        }
    }

    pub fn evaluate(&self, u: T) -> Complex<T> {
        self.mixture.characteristic(u)
    }

    /// Samples `p(w) = (1/2π) ∫ e^{-iuw} G(u) du` at `w_j = lo + j (hi-lo)/n`,
    /// `j < n`, by one FFT of even length `n`. The window must contain the
    /// density; `G` is sampled at spacing `2π/(hi-lo)`.
    pub fn invert(&self, lo: T, hi: T, n: usize) -> (Vec<T>, Vec<T>) {
        assert!(n >= 2 && n.is_multiple_of(2) && hi > lo, "inversion needs an even length and a proper window");
        let (lo64, hi64) = (to_f64(lo), to_f64(hi));
        let len = hi64 - lo64;
        let du = std::f64::consts::TAU / len;
        let half = (n / 2) as f64;
        let mut buf: Vec<rustfft::num_complex::Complex<f64>> = (0..n)
            .map(|k| {
                let u = (k as f64 - half) * du;
                let g = self.evaluate(lit(u));
                let phase = cis::<f64>(-u * lo64);
                let z = Complex::new(to_f64(g.re), to_f64(g.im)) * phase;
                rustfft::num_complex::Complex::new(z.re, z.im)
            })
            .collect();
        FftPlanner::<f64>::new().plan_fft_forward(n).process(&mut buf);
        let dw = len / n as f64;
        let ws = (0..n).map(|j| lit(lo64 + j as f64 * dw)).collect();
        let pdf = buf
            .iter()
            .enumerate()
            .map(|(j, z)| {
                // the index shift by n/2 contributes (-1)^j
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                lit(du / std::f64::consts::TAU * sign * z.re)
            })
            .collect();
        (ws, pdf)
    }
}

/// Work-meter characteristic function.
pub fn characteristic_function<T: Real>(
    p: &Protocol<T>,
    ptr: &GaussianPointer<T>,
    rho: &DensityMatrix<T>,
) -> Result<CharacteristicFunction<T>> {
    Ok(CharacteristicFunction::of(&work_meter_pdf(p, ptr, rho)?))
}

/// Deconvolved imprecise-limit density for `⟨{X,P}⟩ = 0`: the projective
/// atoms plus signed atoms at `e_m - (e_n + e_{n'})/2`, `n ≠ n'`.
pub fn imprecise_q<T: Real>(p: &Protocol<T>, rho: &DensityMatrix<T>, sym_xp: T) -> Result<AtomDistribution<T>> {
    if sym_xp != T::zero() {
        return Err(Error::Unsupported(
            "the deconvolved imprecise-limit density exists only for vanishing <{X,P}>; \
             with a complex alpha the inverse transform diverges"
                .into(),
        ));
    }
    let inst = WorkInstance::new(p, rho)?;
    let t = inst.amplitude_tensor();
    let half: T = lit(0.5);
    let points = t
        .iter()
        .map(|(m, n, np, amp)| {
            let w = inst.final_spectrum().eigenvalue(m)
                - half * (inst.initial().eigenvalue(n) + inst.initial().eigenvalue(np));
            (w, amp.re)
        })
        .collect();
    Ok(AtomDistribution::from_points(
        Scheme::ImpreciseQ,
        points,
        atom_tolerance(inst.spectral_scale()),
        true,
    ))
}

/// Single Gaussian of variance `σ_e²` centered on the untouched average.
pub fn broad_gaussian_approx<T: Real>(p: &Protocol<T>, rho: &DensityMatrix<T>, sigma_e2: T) -> Result<GaussianMixture<T>> {
    if !(sigma_e2 > T::zero()) {
        return Err(Error::Validation(format!("sigma_e2 must be positive, got {sigma_e2}")));
    }
    let c = p.untouched_average_work(rho)?;
    let term = MixtureTerm {
        weight: Complex::new(T::one(), T::zero()),
        center: Complex::new(c, T::zero()),
        variance: sigma_e2,
    };
    Ok(GaussianMixture::new(Scheme::BroadGaussian, vec![term], sigma_e2, None))
}

/// Terletsky-Margenau-Hill weights `Re Tr ρ {U†Π_m U, Π_n}/2` at `w_{mn}`.
pub fn tmh_quasi_pdf<T: Real>(p: &Protocol<T>, rho: &DensityMatrix<T>) -> Result<AtomDistribution<T>> {
    let inst = WorkInstance::new(p, rho)?;
    let t = inst.amplitude_tensor();
    let mut points = Vec::new();
    for m in 0..inst.final_levels() {
        for n in 0..inst.initial_levels() {
            // Tr Π_m U Π_n ρ U† = Σ_{n'} p(m,n,n')
            let w = (0..inst.initial_levels()).fold(T::zero(), |a, np| a + t.get(m, n, np).re);
            points.push((inst.work_value(m, n), w));
        }
    }
    Ok(AtomDistribution::from_points(
        Scheme::Tmh,
        points,
        atom_tolerance(inst.spectral_scale()),
        true,
    ))
}

/// One side-by-side comparison `lhs ≪ rhs` (or `≫`), judged by a factor 10.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Inequality {
    pub lhs: f64,
    /// `None` when the minimum runs over an empty set.
    pub rhs: Option<f64>,
    pub holds: bool,
}

/// Margins of the accurate- and imprecise-limit conditions.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResolutionReport {
    /// `2σ_nd² ≪ min_{n≠n'} (e_n - e_{n'})²`.
    pub coherence_suppression: Inequality,
    /// `2σ_e² ≪ min (w - w')²` over distinct projective work values.
    pub work_resolution: Inequality,
    /// `2σ_nd² ≫ (e_{n*} - e_N)²` over the levels carrying `1 - ε` of the
    /// initial population.
    pub imprecise_validity: Inequality,
    /// `(max e_n(0) - min e_n(0))²` over all initial levels.
    pub raw_initial_spread2: f64,
    pub epsilon: f64,
    pub accurate_limit: bool,
    pub imprecise_limit: bool,
}

const MUCH: f64 = 10.0;

/// Evaluates the three resolution conditions; `epsilon` is the population
/// fraction that may be discarded when forming the occupied level set.
pub fn resolution_check<T: Real>(
    d0: &SpectralDecomposition<T>,
    dt: &SpectralDecomposition<T>,
    ptr: &GaussianPointer<T>,
    populations: &[T],
    epsilon: f64,
) -> Result<ResolutionReport> {
    if populations.len() != d0.levels() {
        return Err(Error::DimensionMismatch {
            expected: d0.levels(),
            found: populations.len(),
        });
    }
    let nd2 = 2.0 * to_f64(ptr.sigma_nd2());
    let e2 = 2.0 * to_f64(ptr.sigma_e2());
    let e0: Vec<f64> = d0.eigenvalues().iter().map(|&e| to_f64(e)).collect();
    let et: Vec<f64> = dt.eigenvalues().iter().map(|&e| to_f64(e)).collect();

    let gap0 = e0.windows(2).map(|w| (w[1] - w[0]).powi(2)).fold(None, min_opt);
    let coherence_suppression = Inequality {
        lhs: nd2,
        rhs: gap0,
        holds: gap0.is_none_or(|g| MUCH * nd2 <= g),
    };

    let mut works: Vec<f64> = et.iter().flat_map(|&m| e0.iter().map(move |&n| m - n)).collect();
    works.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let scale = (e0[e0.len() - 1] - e0[0]) + (et[et.len() - 1] - et[0]);
    let merge = 1e-8 * scale.max(f64::EPSILON);
    let gapw = works
        .windows(2)
        .map(|w| w[1] - w[0])
        .filter(|&g| g > merge)
        .map(|g| g * g)
        .fold(None, min_opt);
    let work_resolution = Inequality {
        lhs: e2,
        rhs: gapw,
        holds: gapw.is_none_or(|g| MUCH * e2 <= g),
    };

    let mut order: Vec<usize> = (0..populations.len()).collect();
    order.sort_by(|&a, &b| to_f64(populations[b]).partial_cmp(&to_f64(populations[a])).unwrap());
    let mut kept = Vec::new();
    let mut acc = 0.0;
    for k in order {
        if acc >= 1.0 - epsilon {
            break;
        }
        acc += to_f64(populations[k]);
        kept.push(e0[k]);
    }
    let lo = kept.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = kept.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let spread = if kept.is_empty() { 0.0 } else { (hi - lo).powi(2) };
    let imprecise_validity = Inequality {
        lhs: nd2,
        rhs: Some(spread),
        holds: nd2 >= MUCH * spread,
    };
    Ok(ResolutionReport {
        accurate_limit: coherence_suppression.holds && work_resolution.holds,
        imprecise_limit: imprecise_validity.holds,
        coherence_suppression,
        work_resolution,
        imprecise_validity,
        raw_initial_spread2: (e0[e0.len() - 1] - e0[0]).powi(2),
        epsilon,
    })
}

fn min_opt(acc: Option<f64>, x: f64) -> Option<f64> {
    Some(acc.map_or(x, |a| a.min(x)))
}

/// Resolution check for a protocol and state with the default `ε = 1e-6`.
pub fn resolution_check_for<T: Real>(
    p: &Protocol<T>,
    ptr: &GaussianPointer<T>,
    rho: &DensityMatrix<T>,
) -> Result<ResolutionReport> {
    let (d0, dt) = p.decompose()?;
    let pops = d0.populations(rho.matrix());
    resolution_check(&d0, &dt, ptr, &pops, 1e-6)
}

/// Samples a mixture on a grid, returning `(w, pdf)`.
pub fn sample<T: Real>(m: &GaussianMixture<T>, grid: &Grid<T>) -> (Vec<T>, Vec<T>) {
    let ws = grid.values();
    let ps = m.evaluate_many(&ws);
    (ws, ps)
}

/// Local maxima of a mixture: sign changes of `dp/dw` on a grid, refined by
/// bisection to `1e-13` relative width.
pub fn local_maxima<T: Real>(m: &GaussianMixture<T>, grid: &Grid<T>) -> Vec<T> {
    let ws = grid.values();
    let ds: Vec<T> = ws.iter().map(|&w| m.derivative(w)).collect();
    let mut out = Vec::new();
    for k in 0..ws.len() - 1 {
        if ds[k] > T::zero() && ds[k + 1] <= T::zero() {
            let (mut a, mut b) = (ws[k], ws[k + 1]);
            for _ in 0..200 {
                let mid = (a + b) * lit(0.5);
                if m.derivative(mid) > T::zero() {
                    a = mid;
                } else {
                    b = mid;
                }
                if b - a <= lit::<T>(1e-13) * (T::one() + a.abs()) {
                    break;
                }
            }
            out.push((a + b) * lit(0.5));
        }
    }
    out
}

/// `∫ |p - q|` by trapezoid on `grid`.
pub fn l1_distance<T: Real>(p: &GaussianMixture<T>, q: &GaussianMixture<T>, grid: &Grid<T>) -> T {
    let ws = grid.values();
    let diff: Vec<T> = ws.iter().map(|&w| (p.evaluate(w) - q.evaluate(w)).abs()).collect();
    grid.trapezoid(&diff)
}
