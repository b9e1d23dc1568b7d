//! Brute-force reference for pointer-based energy and work measurements.
//!
//! The pointer lives on a uniform position grid. Mixed Gaussian pointer
//! states are split into pure runs: a chirp `exp(i a x²/(2ħ))` removes the
//! position-momentum correlation, and the remaining uncorrelated Gaussian
//! is a thermal oscillator state whose eigenfunctions are Hermite functions
//! with geometric weights. Each run is pushed through the system-pointer
//! circuit with exact Fourier-space shifts, and the pointer position is
//! read from the sampled amplitudes. No Gaussian-mixture algebra is used.

// `!(x > 0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use nalgebra::DMatrix;
use num_complex::Complex;
use qwork_core::{DensityMatrix, Error, GaussianPointer, Protocol, Result, SpectralDecomposition};
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

type C64 = Complex<f64>;

/// Relative mass allowed in the outer bands of position or wavenumber space.
pub const LEAKAGE_LIMIT: f64 = 1e-10;

/// Uniform position grid `x_j = x_min + j dx`, `j < n_points`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointerGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
}

impl PointerGrid {
    pub fn new(x_min: f64, x_max: f64, n_points: usize) -> Result<Self> {
        if !n_points.is_power_of_two() || n_points < 16 {
            return Err(Error::Validation(format!("grid size must be a power of two >= 16, got {n_points}")));
        }
        if !(x_max > x_min) {
            return Err(Error::Validation("grid needs x_max > x_min".into()));
        }
        Ok(Self { x_min, x_max, n_points })
    }

    /// Window covering every pointer position the circuit can reach, padded
    /// by eight standard deviations of the widest pure run.
    pub fn covering(ptr: &GaussianPointer<f64>, positions: &[f64], n_points: usize) -> Result<Self> {
        let modes = PointerModes::new(ptr);
        let reach = 8.0 * modes.max_width();
        let lo = positions.iter().cloned().fold(0.0, f64::min) - reach;
        let hi = positions.iter().cloned().fold(0.0, f64::max) + reach;
        Self::new(lo, hi, n_points)
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / self.n_points as f64
    }

    pub fn x(&self, j: usize) -> f64 {
        self.x_min + j as f64 * self.dx()
    }

    pub fn positions(&self) -> Vec<f64> {
        (0..self.n_points).map(|j| self.x(j)).collect()
    }

    /// FFT wavenumbers in standard order.
    pub fn wavenumbers(&self) -> Vec<f64> {
        wavenumbers(self.n_points, self.dx())
    }
}

fn wavenumbers(n: usize, dx: f64) -> Vec<f64> {
    let base = std::f64::consts::TAU / (n as f64 * dx);
    (0..n)
        .map(|m| if m < n / 2 { m as f64 } else { m as f64 - n as f64 } * base)
        .collect()
}

/// Pure-state decomposition of a Gaussian pointer.
#[derive(Clone, Debug)]
pub struct PointerModes {
    /// Chirp rate `a = ⟨{X,P}⟩ / (2⟨X²⟩)`.
    pub chirp: f64,
    /// Length `ℓ` of the Hermite functions, `ℓ² = 2⟨X²⟩/ν`.
    pub length: f64,
    /// Weights `(1-r) r^k`, truncated where the tail drops below `1e-12`
    /// and renormalized.
    pub weights: Vec<f64>,
    pub hbar: f64,
}

impl PointerModes {
    pub fn new(ptr: &GaussianPointer<f64>) -> Self {
        let (x2, p2, s, hbar) = (ptr.var_x(), ptr.var_p(), ptr.sym_xp(), ptr.hbar());
        let chirp = s / (2.0 * x2);
        let p0 = (p2 - s * s / (4.0 * x2)).max(0.0);
        let nu = (2.0 * (x2 * p0).sqrt() / hbar).max(1.0);
        let r = (nu - 1.0) / (nu + 1.0);
        let mut weights = vec![1.0 - r];
        let mut tail = r;
        while tail > 1e-12 {
            weights.push(weights[weights.len() - 1] * r);
            tail *= r;
        }
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= total);
        Self {
            chirp,
            length: (2.0 * x2 / nu).sqrt(),
            weights,
            hbar,
        }
    }

    pub fn count(&self) -> usize {
        self.weights.len()
    }

    /// Position standard deviation of the highest retained mode.
    pub fn max_width(&self) -> f64 {
        self.length * ((2 * self.count() - 1) as f64 / 2.0).sqrt()
    }

    /// All retained modes sampled on `xs`: `modes[k][j] = ψ_k(x_j)`.
    pub fn sample(&self, xs: &[f64]) -> Vec<Vec<C64>> {
        let k_max = self.count();
        let mut out = vec![vec![C64::new(0.0, 0.0); xs.len()]; k_max];
        let norm0 = std::f64::consts::PI.powf(-0.25) / self.length.sqrt();
        for (j, &x) in xs.iter().enumerate() {
            let xi = x / self.length;
            let chirp = C64::from_polar(1.0, self.chirp * x * x / (2.0 * self.hbar));
            let mut prev = 0.0;
            let mut cur = norm0 * (-0.5 * xi * xi).exp();
            for (k, row) in out.iter_mut().enumerate() {
                row[j] = chirp * cur;
                let next = (2.0 / (k + 1) as f64).sqrt() * xi * cur - (k as f64 / (k + 1) as f64).sqrt() * prev;
                prev = cur;
                cur = next;
            }
        }
        out
    }
}

/// Density sampled on a uniform outcome grid.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledDensity {
    pub w: Vec<f64>,
    pub pdf: Vec<f64>,
}

impl SampledDensity {
    pub fn step(&self) -> f64 {
        self.w[1] - self.w[0]
    }

    pub fn mass(&self) -> f64 {
        self.pdf.iter().sum::<f64>() * self.step()
    }

    pub fn moment(&self, k: i32) -> f64 {
        self.w.iter().zip(&self.pdf).map(|(w, p)| w.powi(k) * p).sum::<f64>() * self.step()
    }

    /// `Σ |pdf - f(w)| dw` against a reference density.
    pub fn l1_to(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.w.iter().zip(&self.pdf).map(|(&w, &p)| (p - f(w)).abs()).sum::<f64>() * self.step()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("w,pdf\n");
        for (w, p) in self.w.iter().zip(&self.pdf) {
            s.push_str(&format!("{w:.12e},{p:.12e}\n"));
        }
        s
    }
}

struct Ffts {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    n: usize,
}

impl Ffts {
    fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
            n,
        }
    }

    fn forward(&self, v: &mut [C64]) {
        self.forward.process(v);
    }

    /// Normalized inverse transform.
    fn inverse(&self, v: &mut [C64]) {
        self.inverse.process(v);
        let s = 1.0 / self.n as f64;
        v.iter_mut().for_each(|z| *z *= s);
    }
}

fn band(n: usize) -> usize {
    (n / 32).max(1)
}

/// Fraction of `Σ|v|²` (or of `Σ v` for densities) in the outer bands.
fn edge_fraction(v: &[f64]) -> f64 {
    let n = v.len();
    let b = band(n);
    let total: f64 = v.iter().map(|x| x.abs()).sum();
    let edge: f64 = v[..b].iter().chain(&v[n - b..]).map(|x| x.abs()).sum();
    if total > 0.0 {
        edge / total
    } else {
        0.0
    }
}

/// Fraction of spectral power at wavenumbers near the Nyquist limit.
fn spectral_edge_fraction(spectrum: &[C64]) -> f64 {
    let n = spectrum.len();
    let b = band(n);
    let total: f64 = spectrum.iter().map(|z| z.norm_sqr()).sum();
    let edge: f64 = spectrum[n / 2 - b..n / 2 + b].iter().map(|z| z.norm_sqr()).sum();
    if total > 0.0 {
        edge / total
    } else {
        0.0
    }
}

fn leakage_error(what: &str, fraction: f64) -> Error {
    Error::Numeric(format!(
        "grid leakage: {what} carries relative mass {fraction:.3e} > {LEAKAGE_LIMIT:e}; \
         widen the window or increase the number of grid points"
    ))
}

/// Columns of the eigenbasis with the energy of each column.
fn eigen_columns(d: &SpectralDecomposition<f64>) -> (DMatrix<C64>, Vec<f64>) {
    let energies = (0..d.dim()).map(|k| d.column_energy(k)).collect();
    (d.basis().clone(), energies)
}

/// Pointer runs `(weight, spectrum)` with spectra checked for resolution.
fn pointer_spectra(ptr: &GaussianPointer<f64>, grid: &PointerGrid, ffts: &Ffts) -> Result<Vec<(f64, Vec<C64>)>> {
    let modes = PointerModes::new(ptr);
    let xs = grid.positions();
    let mut out = Vec::with_capacity(modes.count());
    for (k, mut psi) in modes.sample(&xs).into_iter().enumerate() {
        let dens: Vec<f64> = psi.iter().map(|z| z.norm_sqr()).collect();
        let f = edge_fraction(&dens);
        if f > LEAKAGE_LIMIT {
            return Err(leakage_error(&format!("pointer mode {k}"), f));
        }
        ffts.forward(&mut psi);
        let f = spectral_edge_fraction(&psi);
        if f > LEAKAGE_LIMIT {
            return Err(leakage_error(&format!("wavenumber content of pointer mode {k}"), f));
        }
        out.push((modes.weights[k], psi));
    }
    Ok(out)
}

fn check_problem(p: &Protocol<f64>, rho: &DensityMatrix<f64>) -> Result<()> {
    if p.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            found: rho.dim(),
        });
    }
    Ok(())
}

/// Default grid for a work-meter run: covers the initial pointer and every
/// shift `κ w_{mn}`.
pub fn work_meter_grid(p: &Protocol<f64>, ptr: &GaussianPointer<f64>, n_points: usize) -> Result<PointerGrid> {
    let (d0, dt) = p.decompose()?;
    let k = ptr.kappa();
    let mut pos = Vec::new();
    for &em in dt.eigenvalues() {
        for &en in d0.eigenvalues() {
            pos.push(k * (em - en));
        }
    }
    PointerGrid::covering(ptr, &pos, n_points)
}

/// Default grid for two energy measurements: covers `κ e_n(0)`, `κ w_{mn}`
/// and the origin.
pub fn two_measurement_grid(p: &Protocol<f64>, ptr: &GaussianPointer<f64>, n_points: usize) -> Result<PointerGrid> {
    let (d0, dt) = p.decompose()?;
    let k = ptr.kappa();
    let mut pos: Vec<f64> = d0.eigenvalues().iter().map(|e| k * e).collect();
    for &em in dt.eigenvalues() {
        for &en in d0.eigenvalues() {
            pos.push(k * (em - en));
        }
    }
    PointerGrid::covering(ptr, &pos, n_points)
}

/// Work meter: shift the pointer by `-κ e_n(0)`, evolve, shift by `+κ e_m(τ)`,
/// read the position once. Returns the density of `w = x/κ`.
pub fn simulate_work_meter(
    p: &Protocol<f64>,
    ptr: &GaussianPointer<f64>,
    rho: &DensityMatrix<f64>,
    grid: &PointerGrid,
) -> Result<SampledDensity> {
    let (density, _) = work_meter_run(p, ptr, rho, grid, None)?;
    let kappa = ptr.kappa();
    Ok(SampledDensity {
        w: grid.positions().iter().map(|x| x / kappa).collect(),
        pdf: density.iter().map(|p| p * kappa).collect(),
    })
}

/// Work-meter post-measurement operators `κ φ_{κw}(ρ)` at every `stride`-th
/// grid point, as `(w, operator)`.
pub fn simulate_work_meter_operations(
    p: &Protocol<f64>,
    ptr: &GaussianPointer<f64>,
    rho: &DensityMatrix<f64>,
    grid: &PointerGrid,
    stride: usize,
) -> Result<Vec<(f64, DMatrix<C64>)>> {
    let (_, ops) = work_meter_run(p, ptr, rho, grid, Some(stride.max(1)))?;
    Ok(ops)
}

type Operators = Vec<(f64, DMatrix<C64>)>;

fn work_meter_run(
    p: &Protocol<f64>,
    ptr: &GaussianPointer<f64>,
    rho: &DensityMatrix<f64>,
    grid: &PointerGrid,
    stride: Option<usize>,
) -> Result<(Vec<f64>, Operators)> {
    check_problem(p, rho)?;
    let (d0, dt) = p.decompose()?;
    let (w0, e0) = eigen_columns(&d0);
    let (wt, et) = eigen_columns(&dt);
    let m = wt.adjoint() * p.propagator() * &w0;
    let n = grid.n_points;
    let dim = p.dim();
    let kappa = ptr.kappa();
    let ffts = Ffts::new(n);
    let ks = grid.wavenumbers();
    let runs = pointer_spectra(ptr, grid, &ffts)?;

    // net shift κ(e_b(τ) - e_a(0)) for each (b, a)
    let phases: Vec<Vec<Vec<C64>>> = (0..dim)
        .map(|b| {
            (0..dim)
                .map(|a| {
                    let s = kappa * (et[b] - e0[a]);
                    ks.iter().map(|&k| C64::from_polar(1.0, -k * s)).collect()
                })
                .collect()
        })
        .collect();

    let mut density = vec![0.0; n];
    let sampled: Vec<usize> = stride.map(|s| (0..n).step_by(s).collect()).unwrap_or_default();
    let mut ops: Vec<DMatrix<C64>> = sampled.iter().map(|_| DMatrix::zeros(dim, dim)).collect();
    for (r, chi) in rho.pure_components(1e-14)? {
        let c = w0.adjoint() * nalgebra::DVector::from_vec(chi);
        for (lam, spec) in &runs {
            let weight = r * lam;
            let mut amps: Vec<Vec<C64>> = Vec::with_capacity(dim);
            for b in 0..dim {
                let mut buf = vec![C64::new(0.0, 0.0); n];
                for a in 0..dim {
                    let coef = m[(b, a)] * c[a];
                    if coef.norm_sqr() == 0.0 {
                        continue;
                    }
                    for ((z, ph), s) in buf.iter_mut().zip(&phases[b][a]).zip(spec) {
                        *z += coef * ph * s;
                    }
                }
                ffts.inverse(&mut buf);
                for (d, z) in density.iter_mut().zip(&buf) {
                    *d += weight * z.norm_sqr();
                }
                amps.push(buf);
            }
            for (slot, &j) in sampled.iter().enumerate() {
                // amplitude in the H(τ) eigenbasis, mapped back to the original basis
                let v = &wt * nalgebra::DVector::from_iterator(dim, amps.iter().map(|col| col[j]));
                ops[slot] += &v * v.adjoint() * C64::new(weight * kappa, 0.0);
            }
        }
    }
    let f = edge_fraction(&density);
    if f > LEAKAGE_LIMIT {
        return Err(leakage_error("final pointer density", f));
    }
    let ops = sampled.iter().zip(ops).map(|(&j, op)| (grid.x(j) / kappa, op)).collect();
    Ok((density, ops))
}

/// Single Gaussian energy measurement: pointer shifted by `+κ e_n`; returns
/// `κ φ_{κE}(ρ)` at every `stride`-th grid point as `(E, operator)`.
pub fn simulate_energy_operations(
    d: &SpectralDecomposition<f64>,
    ptr: &GaussianPointer<f64>,
    rho: &DensityMatrix<f64>,
    grid: &PointerGrid,
    stride: usize,
) -> Result<Vec<(f64, DMatrix<C64>)>> {
    if d.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: d.dim(),
            found: rho.dim(),
        });
    }
    let (w, e) = eigen_columns(d);
    let n = grid.n_points;
    let dim = d.dim();
    let kappa = ptr.kappa();
    let ffts = Ffts::new(n);
    let ks = grid.wavenumbers();
    let runs = pointer_spectra(ptr, grid, &ffts)?;
    let sampled: Vec<usize> = (0..n).step_by(stride.max(1)).collect();
    let mut ops: Vec<DMatrix<C64>> = sampled.iter().map(|_| DMatrix::zeros(dim, dim)).collect();
    let mut density = vec![0.0; n];
    for (r, chi) in rho.pure_components(1e-14)? {
        let c = w.adjoint() * nalgebra::DVector::from_vec(chi);
        for (lam, spec) in &runs {
            let mut amps = Vec::with_capacity(dim);
            for a in 0..dim {
                let s = kappa * e[a];
                let mut buf: Vec<C64> = spec
                    .iter()
                    .zip(&ks)
                    .map(|(z, &k)| z * C64::from_polar(1.0, -k * s) * c[a])
                    .collect();
                ffts.inverse(&mut buf);
                for (dd, z) in density.iter_mut().zip(&buf) {
                    *dd += r * lam * z.norm_sqr();
                }
                amps.push(buf);
            }
            for (slot, &j) in sampled.iter().enumerate() {
                let v = &w * nalgebra::DVector::from_iterator(dim, amps.iter().map(|col| col[j]));
                ops[slot] += &v * v.adjoint() * C64::new(r * lam * kappa, 0.0);
            }
        }
    }
    let f = edge_fraction(&density);
    if f > LEAKAGE_LIMIT {
        return Err(leakage_error("pointer density after coupling", f));
    }
    Ok(sampled.iter().zip(ops).map(|(&j, op)| (grid.x(j) / kappa, op)).collect())
}

/// Two independent pointers: the first is shifted by `+κ e_n(0)` and read,
/// the system evolves, the second is shifted by `+κ e_m(τ)` and read.
/// Returns the density of `w = (x₂ - x₁)/κ`.
pub fn simulate_two_measurements(
    p: &Protocol<f64>,
    ptr: &GaussianPointer<f64>,
    rho: &DensityMatrix<f64>,
    grid: &PointerGrid,
) -> Result<SampledDensity> {
    check_problem(p, rho)?;
    let (d0, dt) = p.decompose()?;
    let (w0, e0) = eigen_columns(&d0);
    let (wt, et) = eigen_columns(&dt);
    let m = wt.adjoint() * p.propagator() * &w0;
    let n = grid.n_points;
    let dim = p.dim();
    let kappa = ptr.kappa();
    let dx = grid.dx();
    let ffts = Ffts::new(n);
    let ks = grid.wavenumbers();
    let runs = pointer_spectra(ptr, grid, &ffts)?;

    let shifts: Vec<Vec<C64>> = e0
        .iter()
        .map(|&e| ks.iter().map(|&k| C64::from_polar(1.0, -k * kappa * e)).collect())
        .collect();

    // F_b(x₁): first-pointer density jointly with final level b
    let mut f = vec![vec![0.0; n]; dim];
    for (r, chi) in rho.pure_components(1e-14)? {
        let c = w0.adjoint() * nalgebra::DVector::from_vec(chi);
        for (lam, spec) in &runs {
            let shifted: Vec<Vec<C64>> = (0..dim)
                .map(|a| {
                    let mut buf: Vec<C64> = spec.iter().zip(&shifts[a]).map(|(s, ph)| s * ph * c[a]).collect();
                    ffts.inverse(&mut buf);
                    buf
                })
                .collect();
            for (b, fb) in f.iter_mut().enumerate() {
                for (j, slot) in fb.iter_mut().enumerate() {
                    let amp = (0..dim).fold(C64::new(0.0, 0.0), |acc, a| acc + m[(b, a)] * shifted[a][j]);
                    *slot += r * lam * amp.norm_sqr();
                }
            }
        }
    }
    for (b, fb) in f.iter().enumerate() {
        let frac = edge_fraction(fb);
        if frac > LEAKAGE_LIMIT {
            return Err(leakage_error(&format!("first pointer density for final level {b}"), frac));
        }
    }

    // second pointer position density before its shift
    let modes = PointerModes::new(ptr);
    let xs = grid.positions();
    let mut g = vec![0.0; n];
    for (lam, psi) in modes.weights.iter().zip(modes.sample(&xs)) {
        for (gj, z) in g.iter_mut().zip(&psi) {
            *gj += lam * z.norm_sqr();
        }
    }

    // p_D(D) = Σ_b ∫ F_b(x) G(x + D - κ e_b) dx by zero-padded correlation
    let big = 2 * n;
    let fft2 = Ffts::new(big);
    let k2 = wavenumbers(big, dx);
    let pad = |v: &[f64]| -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); big];
        for (o, &x) in out.iter_mut().zip(v) {
            *o = C64::new(x, 0.0);
        }
        out
    };
    let mut g_hat = pad(&g);
    fft2.forward(&mut g_hat);
    let mut acc = vec![C64::new(0.0, 0.0); big];
    for (b, fb) in f.iter().enumerate() {
        let mut f_hat = pad(fb);
        fft2.forward(&mut f_hat);
        let s = kappa * et[b];
        for ((a, fh), (gh, &k)) in acc.iter_mut().zip(&f_hat).zip(g_hat.iter().zip(&k2)) {
            *a += fh.conj() * gh * C64::from_polar(1.0, -k * s);
        }
    }
    fft2.inverse(&mut acc);
    let corr: Vec<f64> = acc.iter().map(|z| z.re * dx).collect();
    let frac = edge_fraction(&rotate(&corr));
    if frac > LEAKAGE_LIMIT {
        return Err(leakage_error("work density", frac));
    }
    let ordered = rotate(&corr);
    let w = (0..big).map(|l| (l as f64 - n as f64) * dx / kappa).collect();
    let pdf = ordered.iter().map(|v| v * kappa).collect();
    Ok(SampledDensity { w, pdf })
}

/// Reorders circular lags `0..2n` to run from `-n` to `n-1`.
fn rotate(v: &[f64]) -> Vec<f64> {
    let n = v.len() / 2;
    v[n..].iter().chain(&v[..n]).cloned().collect()
}
