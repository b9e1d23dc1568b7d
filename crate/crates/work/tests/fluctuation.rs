mod common;

use common::boltzmann_with_coherence;
use nalgebra::DMatrix;
use num_complex::Complex;
use qwork::fluctuation::{beta_delta_f, crooks_violation, jarzynski, modified_crooks_violation};
use qwork::qwork_core::matrix::{max_abs, unitarity_defect};
use qwork::qwork_core::{CMatrix, DensityMatrix, Error, GaussianPointer, HermitianOperator, Protocol, Schedule, Segment};
use qwork::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn real_symmetric(rng: &mut StdRng, dim: usize) -> HermitianOperator<f64> {
    let g = DMatrix::from_fn(dim, dim, |_, _| Complex::new(rng.random_range(-1.0..1.0), 0.0));
    HermitianOperator::new((&g + g.transpose()) * Complex::new(0.5, 0.0)).unwrap()
}

fn real_protocol(rng: &mut StdRng, dim: usize, segments: usize) -> Protocol<f64> {
    let h0 = real_symmetric(rng, dim);
    let ht = real_symmetric(rng, dim);
    let segs = (0..segments)
        .map(|_| Segment {
            hamiltonian: real_symmetric(rng, dim),
            duration: rng.random_range(0.3..1.2),
        })
        .collect();
    Protocol::from_schedule(h0, ht, Schedule::new(segs, 1.0).unwrap()).unwrap()
}

/// Spin quench with the canonical diagonal of `H_i` at `beta` and coherence `q`.
fn canonical_spin(beta: f64, q: f64) -> (Protocol<f64>, DensityMatrix<f64>) {
    let p = 1.0 / (1.0 + (-beta).exp());
    let s = SpinQuench::new(p, Complex::new(q, 0.0), 1.0, 2.0).unwrap();
    (s.protocol().unwrap(), s.state().unwrap())
}

#[test]
fn sudden_quench_reverses_by_swapping() {
    let s = SpinQuench::standard(0.0);
    let p = s.protocol::<f64>().unwrap();
    let b = build_backward(&p).unwrap();
    assert_eq!(b.initial_hamiltonian(), p.final_hamiltonian());
    assert_eq!(b.final_hamiltonian(), p.initial_hamiltonian());
    assert_eq!(b.propagator(), &CMatrix::identity(2, 2));
}

#[test]
fn single_real_segment_is_self_reversed() {
    let mut rng = StdRng::seed_from_u64(6);
    let p = real_protocol(&mut rng, 3, 1);
    let b = build_backward(&p).unwrap();
    assert!(max_abs(&(b.propagator() - p.propagator())) < 1e-14);
}

#[test]
fn two_segments_reverse_their_order() {
    let mut rng = StdRng::seed_from_u64(7);
    let p = real_protocol(&mut rng, 3, 2);
    let b = build_backward(&p).unwrap();
    let segs = p.schedule().unwrap().segments();
    let u1 = qwork::qwork_core::evolution_operator(&segs[0].hamiltonian, segs[0].duration, 1.0).unwrap();
    let u2 = qwork::qwork_core::evolution_operator(&segs[1].hamiltonian, segs[1].duration, 1.0).unwrap();
    assert!(max_abs(&(b.propagator() - &u1 * &u2)) < 1e-13);
    assert!(unitarity_defect(b.propagator()) < 1e-12);
    assert!(max_abs(&(b.propagator() - p.propagator())) > 1e-3);
    // for real generators the reversed product is the transpose
    assert!(max_abs(&(b.propagator() - p.propagator().transpose())) < 1e-13);
}

#[test]
fn explicit_propagators_need_a_backward_partner() {
    let u = qwork::qwork_core::sample::random_unitary::<f64, _>(&mut StdRng::seed_from_u64(1), 2);
    let h = HermitianOperator::<f64>::pauli_z();
    let lone = Protocol::with_propagator(h.clone(), h.clone(), u.clone(), None).unwrap();
    assert!(matches!(build_backward(&lone), Err(Error::Unsupported(_))));
    let paired = Protocol::with_propagator(h.clone(), h, u.clone(), Some(u.adjoint())).unwrap();
    let b = build_backward(&paired).unwrap();
    assert_eq!(b.propagator(), &u.adjoint());
    assert_eq!(b.backward_propagator(), Some(&u));
}

#[test]
fn spin_crooks_relation() {
    let (p, _) = canonical_spin(1.0, 0.0);
    let pair = ProcessPair::canonical(p, 1.0).unwrap();
    let want = -(1.0f64.cosh() / 0.5f64.cosh()).ln();
    assert!((pair.delta_f() - want).abs() < 1e-14);
    let r = crooks_check(&pair).unwrap();
    assert!(r.pass && r.max_violation <= 1e-10, "{}", r.max_violation);
    assert_eq!(r.grid.len(), 4);
}

#[test]
fn infinite_temperature_crooks_is_a_symmetry() {
    let mut rng = StdRng::seed_from_u64(9);
    let p = real_protocol(&mut rng, 3, 2);
    let pair = ProcessPair::canonical(p, 0.0).unwrap();
    assert_eq!(pair.beta_delta_f, 0.0);
    let f = pem_work_pdf(&pair.forward, &pair.forward_state).unwrap();
    let b = pem_work_pdf(&pair.backward, &pair.backward_state).unwrap();
    for (w, a) in &f.atoms {
        assert!((b.weight_at(-w, 1e-9) - a).abs() < 1e-12);
    }
    assert!(crooks_check(&pair).unwrap().pass);
}

#[test]
fn crooks_tolerates_coherences() {
    let mut rng = StdRng::seed_from_u64(10);
    for _ in 0..10 {
        let segments = rng.random_range(0..3);
        let p = real_protocol(&mut rng, 3, segments);
        let beta = rng.random_range(0.2..2.0);
        let b = build_backward(&p).unwrap();
        let rf = boltzmann_with_coherence(&mut rng, p.initial_hamiltonian(), beta, 0.8);
        let rb = boltzmann_with_coherence(&mut rng, b.initial_hamiltonian(), beta, 0.8);
        let pair = ProcessPair::new(p, rf, b, rb, beta).unwrap();
        let r = crooks_check(&pair).unwrap();
        assert!(r.max_violation <= 1e-10, "{}", r.max_violation);
    }
}

#[test]
fn non_boltzmann_diagonal_is_named() {
    let s = SpinQuench::standard(0.0);
    let p = s.protocol::<f64>().unwrap();
    let b = build_backward(&p).unwrap();
    let rb = DensityMatrix::canonical(b.initial_hamiltonian(), 1.0).unwrap();
    let err = ProcessPair::new(p, s.state().unwrap(), b, rb, 1.0).unwrap_err();
    let msg = err.to_string();
    assert!(msg.contains("forward initial state") && msg.contains("Tr Pi_0 rho"), "{msg}");
}

#[test]
fn spin_modified_crooks() {
    let (p, _) = canonical_spin(1.0, 0.0);
    let pair = ProcessPair::canonical(p, 1.0).unwrap();
    let r = modified_crooks_check(&pair, 0.1).unwrap();
    assert!(r.max_violation <= 1e-9, "{}", r.max_violation);
    assert!(modified_crooks_check(&pair, 1e-8).unwrap().pass);

    let (p, rho) = canonical_spin(1.0, 0.2);
    let b = build_backward(&p).unwrap();
    let rb = DensityMatrix::canonical(b.initial_hamiltonian(), 1.0).unwrap();
    let coherent = ProcessPair::new(p, rho, b, rb, 1.0).unwrap();
    assert!(matches!(modified_crooks_check(&coherent, 0.1), Err(Error::Validation(_))));
}

#[test]
fn modified_crooks_violation_is_linear_in_a_perturbation() {
    let (p, _) = canonical_spin(1.0, 0.0);
    let pair = ProcessPair::canonical(p, 1.0).unwrap();
    let ptr = GaussianPointer::pure_with_sigma_e2(0.1).unwrap();
    let f = work_meter_pdf(&pair.forward, &ptr, &pair.forward_state).unwrap();
    let b = work_meter_pdf(&pair.backward, &ptr, &pair.backward_state).unwrap();
    let violation = |delta: f64| {
        let mut g = f.clone();
        g.terms[0].weight *= 1.0 + delta;
        modified_crooks_violation(&g, &b, 1.0, pair.beta_delta_f, 0.1).0
    };
    let base = violation(1e-6);
    for k in [10.0, 100.0] {
        let ratio = violation(1e-6 * k) / base;
        assert!((ratio / k - 1.0).abs() < 1e-3, "ratio {ratio} for {k}");
    }
    assert!(base > 1e-7);
}

#[test]
fn two_gaussian_scheme_obeys_crooks_with_doubled_variance() {
    let mut rng = StdRng::seed_from_u64(11);
    let p = real_protocol(&mut rng, 3, 2);
    let pair = ProcessPair::canonical(p, 0.8).unwrap();
    let ptr = GaussianPointer::pure_with_sigma_e2(0.07).unwrap();
    let f = two_gaussian_work_pdf(&pair.forward, &ptr, &pair.forward_state).unwrap();
    let b = two_gaussian_work_pdf(&pair.backward, &ptr, &pair.backward_state).unwrap();
    let (v, _) = modified_crooks_violation(&f, &b, 0.8, pair.beta_delta_f, 0.14);
    assert!(v <= 1e-8, "{v}");
    let (v, _) = modified_crooks_violation(&f, &b, 0.8, pair.beta_delta_f, 0.07);
    assert!(v > 1e-3);
}

#[test]
fn spin_modified_jarzynski() {
    for (beta, s2) in [(1.0, 0.5), (2.0, 1.0), (0.5, 0.1)] {
        let (p, rho) = canonical_spin(beta, 0.0);
        let r = modified_jarzynski(&p, &GaussianPointer::pure_with_sigma_e2(s2).unwrap(), &rho, beta).unwrap();
        assert!(r.ratio_deviation <= 1e-10, "beta {beta}: {}", r.ratio_deviation);
        let free = beta.cosh() / (0.5 * beta).cosh();
        assert!((r.rhs - free * (0.5 * beta * beta * s2).exp()).abs() < 1e-12 * r.rhs);
    }
    let (p, rho) = canonical_spin(2.0, 0.0);
    let r = modified_jarzynski(&p, &GaussianPointer::pure_with_sigma_e2(1.0).unwrap(), &rho, 2.0).unwrap();
    assert!((r.log_rhs + beta_delta_f_of(&p, 2.0) - 2.0).abs() < 1e-14);
    let plain = jarzynski(&p, &rho, 2.0).unwrap();
    assert!(plain.ratio_deviation < 1e-12);
}

fn beta_delta_f_of(p: &Protocol<f64>, beta: f64) -> f64 {
    let (d0, dt) = p.decompose().unwrap();
    beta_delta_f(&d0, &dt, beta)
}

#[test]
fn jarzynski_correction_depends_only_on_the_variance() {
    let mut rng = StdRng::seed_from_u64(12);
    let p = real_protocol(&mut rng, 4, 2);
    let rho = DensityMatrix::canonical(p.initial_hamiltonian(), 1.3).unwrap();
    let reference = modified_jarzynski(&p, &GaussianPointer::pure_with_sigma_e2(0.3).unwrap(), &rho, 1.3).unwrap();
    assert!(reference.ratio_deviation < 1e-10);
    for (vp, s) in [(2.0, 0.0), (5.0, 0.7), (40.0, -2.0)] {
        let ptr = GaussianPointer::new(0.3, vp, s, 1.0, 1.0).unwrap();
        let r = modified_jarzynski(&p, &ptr, &rho, 1.3).unwrap();
        assert!((r.lhs / r.rhs - reference.lhs / reference.rhs).abs() < 1e-10);
    }
}

#[test]
fn crooks_and_jarzynski_agree() {
    let mut rng = StdRng::seed_from_u64(13);
    for _ in 0..5 {
        let p = real_protocol(&mut rng, 3, 2);
        let beta = rng.random_range(0.3..2.5);
        let pair = ProcessPair::canonical(p.clone(), beta).unwrap();
        assert!(crooks_check(&pair).unwrap().pass);
        // summing Crooks over atoms: ⟨e^{-βw}⟩_F = e^{-βΔF} Σ p_B
        let f = pem_work_pdf(&p, &pair.forward_state).unwrap();
        let b = pem_work_pdf(&pair.backward, &pair.backward_state).unwrap();
        let summed = (-pair.beta_delta_f).exp() * b.total();
        assert!((f.exp_moment(beta) - summed).abs() < 1e-10 * summed);
        assert!(jarzynski(&p, &pair.forward_state, beta).unwrap().ratio_deviation < 1e-10);
    }
}

#[test]
fn coherent_canonical_state_breaks_the_corrected_equality() {
    for beta in [0.5f64, 1.0, 2.0] {
        let p0 = 1.0 / (1.0 + (-beta).exp());
        let (p, rho) = canonical_spin(beta, (p0 * (1.0 - p0)).sqrt());
        let r = modified_jarzynski(&p, &GaussianPointer::pure_with_sigma_e2(0.5).unwrap(), &rho, beta).unwrap();
        assert!(r.ratio_deviation > 1e-3, "beta {beta}: {}", r.ratio_deviation);
    }
}

#[test]
fn crooks_violation_sees_missing_atoms() {
    let f = AtomDistribution::from_points(Scheme::Pem, vec![(0.0, 0.5), (1.0, 0.5)], 1e-9, false);
    let b = AtomDistribution::from_points(Scheme::Pem, vec![(0.0, 0.5), (-1.0, 0.5)], 1e-9, false);
    let (v, _) = crooks_violation(&f, &b, 0.0, 0.0, 1e-9);
    assert!(v < 1e-15);
    let b = AtomDistribution::from_points(Scheme::Pem, vec![(0.0, 0.5), (-2.0, 0.5)], 1e-9, false);
    let (v, grid) = crooks_violation(&f, &b, 0.0, 0.0, 1e-9);
    assert_eq!(v, 1.0);
    assert_eq!(grid.len(), 3);
}

#[test]
fn reports_serialize() {
    let (p, _) = canonical_spin(1.0, 0.0);
    let pair = ProcessPair::canonical(p, 1.0).unwrap();
    let v = serde_json::to_value(crooks_check(&pair).unwrap()).unwrap();
    assert_eq!(v["relation"], "crooks");
    assert!(v["pass"].as_bool().unwrap());
    assert_eq!(v["grid"].as_array().unwrap().len(), 4);
    assert!(v["max_violation"].is_number());
}
