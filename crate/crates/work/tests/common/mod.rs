//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use num_complex::Complex;
use qwork::qwork_core::sample;
use qwork::qwork_core::{
    CMatrix, DensityMatrix, GaussianPointer, HermitianOperator, Protocol, Schedule, Segment,
};
use rand::rngs::StdRng;
use rand::Rng;

pub const PI: f64 = std::f64::consts::PI;

pub fn normal(w: f64, c: f64, v: f64) -> f64 {
    (-(w - c) * (w - c) / (2.0 * v)).exp() / (2.0 * PI * v).sqrt()
}

/// Closed-form work-meter pdf of the spin quench for a pure Gaussian pointer,
/// with the diagonal weights normalized per atom (`p/2`, `(1-p)/2`).
pub fn spin_closed_form(w: f64, p: f64, q: Complex<f64>, eps_i: f64, eps_f: f64, s2: f64) -> f64 {
    let (a, b) = (eps_i / 2.0, eps_f / 2.0);
    let (w11, w21, w12, w22) = (-b + a, b + a, -b - a, b - a);
    let diag = 0.5 * p * (normal(w, w11, s2) + normal(w, w21, s2))
        + 0.5 * (1.0 - p) * (normal(w, w12, s2) + normal(w, w22, s2));
    let coh = (q + q.conj()).re / (2.0 * (2.0 * PI * s2).sqrt())
        * (-(eps_i * eps_i) / (8.0 * s2)).exp()
        * ((-(w - b).powi(2) / (2.0 * s2)).exp() - (-(w + b).powi(2) / (2.0 * s2)).exp());
    diag + coh
}

/// A random problem: Hamiltonians, a 1- or 2-segment schedule and a state.
pub struct Instance {
    pub protocol: Protocol<f64>,
    pub rho: DensityMatrix<f64>,
    pub pointer: GaussianPointer<f64>,
}

pub fn random_protocol(rng: &mut StdRng, dim: usize, segments: usize) -> Protocol<f64> {
    let h0 = sample::random_hermitian::<f64, _>(rng, dim, 2.0);
    let ht = sample::random_hermitian::<f64, _>(rng, dim, 2.0);
    let segs = (0..segments)
        .map(|_| Segment {
            hamiltonian: sample::random_hermitian::<f64, _>(rng, dim, 2.0),
            duration: rng.random_range(0.2..1.5),
        })
        .collect();
    Protocol::from_schedule(h0, ht, Schedule::new(segs, 1.0).unwrap()).unwrap()
}

pub fn random_instance(rng: &mut StdRng, dim: usize, lo: f64, hi: f64) -> Instance {
    let segments = rng.random_range(0..3);
    let protocol = random_protocol(rng, dim, segments);
    let rank = rng.random_range(1..=dim);
    Instance {
        protocol,
        rho: sample::random_density::<f64, _>(rng, dim, rank),
        pointer: sample::random_pointer::<f64, _>(rng, lo, hi),
    }
}

/// Random state with the Boltzmann diagonal of `h` and random coherences.
pub fn boltzmann_with_coherence(rng: &mut StdRng, h: &HermitianOperator<f64>, beta: f64, strength: f64) -> DensityMatrix<f64> {
    let can = DensityMatrix::canonical(h, beta).unwrap();
    let d = qwork::qwork_core::SpectralDecomposition::new(h, None).unwrap();
    let basis = d.basis();
    let n = h.dim();
    // in the eigenbasis: sqrt(p_i p_j) c_ij with |c| small keeps positivity
    let pops: Vec<f64> = (0..n).map(|k| (basis.adjoint() * can.matrix() * basis)[(k, k)].re).collect();
    let mut m = CMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = Complex::new(pops[i], 0.0);
        for j in (i + 1)..n {
            let c = Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) * (strength / n as f64);
            let v = c * (pops[i] * pops[j]).sqrt();
            m[(i, j)] = v;
            m[(j, i)] = v.conj();
        }
    }
    DensityMatrix::new(basis * m * basis.adjoint()).unwrap()
}

/// Brute force `p(m,n,n')` from explicit eigenvectors, one level per column.
pub fn brute_amplitude(p: &Protocol<f64>, rho: &DensityMatrix<f64>, m: usize, n: usize, np: usize) -> Complex<f64> {
    let (d0, dt) = p.decompose().unwrap();
    let x = dt.projector(m) * p.propagator() * d0.projector(n) * rho.matrix() * d0.projector(np) * p.propagator().adjoint();
    x.trace()
}
