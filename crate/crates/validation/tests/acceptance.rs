//! Acceptance gate: one verdict line per criterion, followed by indented
//! detail lines. Exits nonzero when any criterion fails.

#[path = "../../work/tests/common/mod.rs"]
mod common;

use std::process::ExitCode;
use std::time::Instant;

use common::{random_instance, random_protocol, spin_closed_form};
use num_complex::Complex;
use qwork::channels::atom_tolerance;
use qwork::distributions::{l1_distance, local_maxima};
use qwork::qwork_core::matrix::{frobenius, min_eigenvalue};
use qwork::qwork_core::{sample, untouched_average_work, GaussianPointer};
use qwork::spin::LevelOrder;
use qwork::*;
use qwork_oracle::{simulate_two_measurements, simulate_work_meter, two_measurement_grid, work_meter_grid};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

struct Verdict {
    pass: bool,
    summary: String,
    details: Vec<String>,
}

impl Verdict {
    fn new(pass: bool, summary: impl Into<String>) -> Self {
        Self { pass, summary: summary.into(), details: Vec::new() }
    }

    fn detail(mut self, line: impl Into<String>) -> Self {
        self.details.push(line.into());
        self
    }
}

fn pure(s2: f64) -> GaussianPointer<f64> {
    GaussianPointer::pure_with_sigma_e2(s2).unwrap()
}

fn closed_form() -> Verdict {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let ws: Vec<f64> = (0..=2000).map(|k| -6.0 + 0.006 * k as f64).collect();
    for q in [0.0, 0.21f64.sqrt(), -(0.21f64.sqrt())] {
        let s = SpinQuench::standard(q);
        let (p, rho) = (s.protocol::<f64>().unwrap(), s.state::<f64>().unwrap());
        for s2 in [0.01, 0.1, 1.0] {
            let m = work_meter_pdf(&p, &pure(s2), &rho).unwrap();
            for &w in &ws {
                let exact = spin_closed_form(w, 0.7, s.q, 1.0, 2.0, s2);
                worst = worst.max((m.evaluate(w) - exact).abs());
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Verdict::new(
        worst <= 1e-12 && secs < 1.0,
        format!("spin-quench closed form: max |dp| = {worst:.2e} (tol 1e-12), {secs:.3} s (limit 1 s)"),
    )
}

fn peaks() -> Verdict {
    let grid = Grid::new(-4.0, 4.0, 8001);
    let s = SpinQuench::standard(0.0);
    let m = work_meter_pdf(&s.protocol::<f64>().unwrap(), &pure(0.01), &s.state().unwrap()).unwrap();
    let maxima = local_maxima(&m, &grid);
    let targets = [-1.5, -0.5, 0.5, 1.5];
    let off = targets
        .iter()
        .map(|t| maxima.iter().map(|x| (x - t).abs()).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max);
    let stray = maxima
        .iter()
        .map(|x| targets.iter().map(|t| (x - t).abs()).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max);
    let aligned = maxima.len() == 4 && off <= 1e-6 && stray <= 1e-6;
    let mut v = Verdict::new(
        false,
        format!("peak locations: q = 0 has {} maxima, max offset {off:.2e} (tol 1e-6)", maxima.len()),
    );
    let mut displaced_all = true;
    for q in [0.21f64.sqrt(), -(0.21f64.sqrt())] {
        let s = SpinQuench::standard(q);
        let m = work_meter_pdf(&s.protocol::<f64>().unwrap(), &pure(0.1), &s.state().unwrap()).unwrap();
        let maxima = local_maxima(&m, &grid);
        let best = maxima
            .iter()
            .map(|x| targets.iter().map(|t| (x - t).abs()).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max);
        displaced_all &= best > 0.01;
        v = v.detail(format!("q = {q:+.5}: maxima {maxima:.4?}, largest displacement {best:.4} (need > 0.01)"));
    }
    v.pass = aligned && displaced_all;
    v
}

fn mean_limits() -> Verdict {
    let sweep: Vec<f64> = (-6..=4).map(|k| 10f64.powi(k)).collect();
    let mut worst_small = 0.0f64;
    let mut worst_large = 0.0f64;
    let mut v = Verdict::new(false, "");
    for q in [0.0, 0.21f64.sqrt(), -(0.21f64.sqrt())] {
        let s = SpinQuench::standard(q).with_order(LevelOrder::SigmaZ);
        let (p, rho) = (s.protocol::<f64>().unwrap(), s.state::<f64>().unwrap());
        let means: Vec<f64> = sweep.iter().map(|&s2| mean_work(&p, &pure(s2), &rho).unwrap()).collect();
        let small = (means[0] + 0.2).abs();
        let large = (means[means.len() - 1] - (2.0 * q - 0.2)).abs();
        worst_small = worst_small.max(small);
        worst_large = worst_large.max(large);
        let steps: Vec<f64> = means.windows(2).map(|w| w[1] - w[0]).collect();
        let trend = if steps.iter().all(|d| *d >= -1e-15) {
            "non-decreasing"
        } else if steps.iter().all(|d| *d <= 1e-15) {
            "non-increasing"
        } else {
            "non-monotone"
        };
        v = v.detail(format!(
            "q = {q:+.5}: |mean(1e-6) + 0.2| = {small:.2e}, |mean(1e4) - (2q - 0.2)| = {large:.2e}, trend {trend}"
        ));
    }
    let s = SpinQuench::standard(0.21f64.sqrt());
    let (p, rho) = (s.protocol::<f64>().unwrap(), s.state::<f64>().unwrap());
    v = v.detail(format!(
        "ground-first ordering, q = 0.45826: mean(1e-6) = {:.8}, mean(1e4) = {:.8}",
        mean_work(&p, &pure(1e-6), &rho).unwrap(),
        mean_work(&p, &pure(1e4), &rho).unwrap()
    ));
    v.pass = worst_small <= 1e-6 && worst_large <= 1e-6;
    v.summary = format!(
        "average-work limits: small-width deviation {worst_small:.2e}, large-width deviation {worst_large:.2e} (tol 1e-6)"
    );
    v
}

fn imprecise() -> Verdict {
    let s = SpinQuench::standard(0.21f64.sqrt());
    let (p, rho) = (s.protocol::<f64>().unwrap(), s.state::<f64>().unwrap());
    let limit = imprecise_limit_pdf(&p, &pure(1.0), &rho).unwrap();
    let exact = work_meter_pdf(&p, &pure(1.0), &rho).unwrap();
    let near = Grid::new(-2.5, -1.5, 1001).values();
    let neg = near.iter().map(|&w| limit.evaluate(w)).fold(f64::INFINITY, f64::min);
    let wide = Grid::new(-12.0, 12.0, 24001).values();
    let exact_min = wide.iter().map(|&w| exact.evaluate(w)).fold(f64::INFINITY, f64::min);
    let grid = Grid::new(-20.0, 20.0, 40001);
    let l1 = l1_distance(
        &imprecise_limit_pdf(&p, &pure(2.0), &rho).unwrap(),
        &work_meter_pdf(&p, &pure(2.0), &rho).unwrap(),
        &grid,
    );
    Verdict::new(
        neg < 0.0 && exact_min >= -1e-10 && l1 <= 0.05,
        format!(
            "imprecise limit: min limiting pdf on [-2.5, -1.5] = {neg:.3e} (< 0), min exact pdf = {exact_min:.3e} (>= -1e-10), L1 at width 2 = {l1:.4} (<= 0.05)"
        ),
    )
}

fn fluctuation() -> Verdict {
    let mut crooks_worst = 0.0f64;
    let mut jarzynski_worst = 0.0f64;
    let mut coherent_min = f64::INFINITY;
    let mut v = Verdict::new(false, "");
    for beta in [0.5f64, 1.0, 2.0] {
        let pop = 1.0 / (1.0 + (-beta).exp());
        let s = SpinQuench::new(pop, Complex::new(0.0, 0.0), 1.0, 2.0).unwrap();
        let p = s.protocol::<f64>().unwrap();
        let pair = ProcessPair::canonical(p.clone(), beta).unwrap();
        let crooks = crooks_check(&pair).unwrap();
        crooks_worst = crooks_worst.max(crooks.max_violation);
        for s2 in [0.1, 1.0] {
            let j = modified_jarzynski(&p, &pure(s2), &s.state().unwrap(), beta).unwrap();
            jarzynski_worst = jarzynski_worst.max(j.ratio_deviation);
        }
        let qmax = (pop * (1.0 - pop)).sqrt();
        let coherent = SpinQuench::new(pop, Complex::new(qmax, 0.0), 1.0, 2.0).unwrap();
        let j = modified_jarzynski(&p, &pure(0.1), &coherent.state().unwrap(), beta).unwrap();
        coherent_min = coherent_min.min(j.ratio_deviation);
        v = v.detail(format!(
            "beta = {beta}: Crooks {:.2e}, coherent q = {qmax:.4} violation {:.3e}",
            crooks.max_violation, j.ratio_deviation
        ));
    }
    v.pass = crooks_worst <= 1e-10 && jarzynski_worst <= 1e-10 && coherent_min > 1e-3;
    v.summary = format!(
        "fluctuation theorems: Crooks {crooks_worst:.2e} (tol 1e-10), modified Jarzynski {jarzynski_worst:.2e} (tol 1e-10), smallest coherent violation {coherent_min:.3e} (> 1e-3)"
    );
    v
}

fn oracle() -> Verdict {
    let start = Instant::now();
    let points = 1 << 14;
    let mut rng = StdRng::seed_from_u64(4);
    let s = SpinQuench::standard(0.21f64.sqrt());
    let cases = [
        ("spin quench", s.protocol::<f64>().unwrap(), s.state::<f64>().unwrap(), pure(0.1)),
        (
            "random 4-level, two segments",
            random_protocol(&mut rng, 4, 2),
            sample::random_density::<f64, _>(&mut rng, 4, 4),
            sample::random_pointer::<f64, _>(&mut rng, 0.05, 0.5),
        ),
    ];
    let mut worst = 0.0f64;
    let mut v = Verdict::new(false, "");
    for (name, p, rho, ptr) in &cases {
        let meter = work_meter_pdf(p, ptr, rho).unwrap();
        let sim = simulate_work_meter(p, ptr, rho, &work_meter_grid(p, ptr, points).unwrap()).unwrap();
        let a = sim.l1_to(|w| meter.evaluate(w));
        let two = two_gaussian_work_pdf(p, ptr, rho).unwrap();
        let sim = simulate_two_measurements(p, ptr, rho, &two_measurement_grid(p, ptr, points).unwrap()).unwrap();
        let b = sim.l1_to(|w| two.evaluate(w));
        worst = worst.max(a).max(b);
        v = v.detail(format!("{name}: work-meter L1 {a:.2e}, two-Gaussian L1 {b:.2e}"));
    }
    let secs = start.elapsed().as_secs_f64();
    v.pass = worst <= 1e-6 && secs < 30.0;
    v.summary = format!("oracle equivalence: max L1 {worst:.2e} (tol 1e-6), {secs:.2} s at 2^14 points (limit 30 s)");
    v
}

fn channels() -> Verdict {
    let mut rng = StdRng::seed_from_u64(77);
    let mut psd_worst = 0.0f64;
    let mut trace_excess = 0.0f64;
    let mut norm_worst = 0.0f64;
    let mut state_worst = 0.0f64;
    let mut sharp_worst = 0.0f64;
    let mut broad_worst = 0.0f64;
    let mut broad_spin = 0.0f64;
    let mut sharp_spin = 0.0f64;
    for _ in 0..200 {
        let dim = rng.random_range(2..=6);
        let inst = random_instance(&mut rng, dim, 0.01, 2.0);
        let (p, rho, ptr) = (&inst.protocol, &inst.rho, &inst.pointer);
        let wi = WorkInstance::new(p, rho).unwrap();
        for scheme in [GaussianScheme::WorkMeter, GaussianScheme::TwoGaussian] {
            let ch = GaussianWorkChannel::new(&wi, ptr, scheme);
            let sd = ch.variance().sqrt();
            for c in ch.centers() {
                for k in [-1.5, 0.0, 0.7] {
                    let op = ch.operation(c + k * sd);
                    psd_worst = psd_worst.max(-op.min_eigenvalue().min(0.0));
                }
            }
            let quad = ch.outcome_quadrature();
            let mut cumulative = 0.0f64;
            for (w, weight) in quad.nodes.iter().zip(&quad.weights) {
                cumulative += weight * ch.outcome_density(*w);
                trace_excess = trace_excess.max(cumulative - 1.0);
            }
            norm_worst = norm_worst.max((ch.integrated_trace() - 1.0).abs());
            let ns = ch.nonselective().unwrap();
            state_worst = state_worst.max(density_defect(ns.matrix()));
        }
        let pem = pem_work_pdf(p, rho).unwrap();
        for w in pem.positions() {
            let op = pem_operation(p, rho, w).unwrap();
            psd_worst = psd_worst.max(-op.min_eigenvalue().min(0.0));
            trace_excess = trace_excess.max(op.trace() - 1.0);
        }
        state_worst = state_worst.max(density_defect(pem_nonselective(p, rho).unwrap().matrix()));
        let d0 = wi.initial();
        for e in [d0.eigenvalue(0), 0.0] {
            let op = gaussian_energy_operation(d0, ptr, rho, e).unwrap();
            psd_worst = psd_worst.max(-op.min_eigenvalue().min(0.0));
        }
        let (s, b) = limit_deviation(p, rho);
        sharp_worst = sharp_worst.max(s);
        broad_worst = broad_worst.max(b);
    }
    for q in [0.0, 0.21f64.sqrt(), -(0.21f64.sqrt())] {
        let s = SpinQuench::standard(q).with_order(LevelOrder::SigmaZ);
        let (a, b) = limit_deviation(&s.protocol().unwrap(), &s.state().unwrap());
        sharp_spin = sharp_spin.max(a);
        broad_spin = broad_spin.max(b);
    }
    let structural = psd_worst <= 1e-10 && trace_excess <= 1e-10 && norm_worst <= 1e-8 && state_worst <= 1e-10;
    let limits = sharp_worst.max(sharp_spin) <= 1e-6 && broad_worst.max(broad_spin) <= 1e-6;
    Verdict::new(
        structural && limits,
        format!(
            "channel properties: 200 instances, PSD defect {psd_worst:.1e}, trace excess {trace_excess:.1e}, normalization {norm_worst:.1e} (tol 1e-8), state defect {state_worst:.1e}; limits sharp {:.2e}, broad {:.2e} (tol 1e-6)",
            sharp_worst.max(sharp_spin),
            broad_worst.max(broad_spin)
        ),
    )
    .detail(format!("random instances: width 1e-6 vs projective state {sharp_worst:.2e}, width 1e4 vs U rho U^dag {broad_worst:.2e}"))
    .detail(format!("spin quench: width 1e-6 vs projective state {sharp_spin:.2e}, width 1e4 vs U rho U^dag {broad_spin:.2e}"))
}

/// Negative eigenvalue, trace and hermiticity errors of a state candidate.
fn density_defect(m: &qwork::qwork_core::CMatrix<f64>) -> f64 {
    let herm = frobenius(&(m - m.adjoint()));
    let neg = -min_eigenvalue(m).unwrap().min(0.0);
    herm.max(neg).max((m.trace().re - 1.0).abs())
}

/// Work-meter non-selective state at the sweep endpoints against its limits.
fn limit_deviation(p: &qwork::qwork_core::Protocol<f64>, rho: &qwork::qwork_core::DensityMatrix<f64>) -> (f64, f64) {
    let sharp = work_meter_nonselective(p, &pure(1e-6), rho).unwrap();
    let pem = pem_nonselective(p, rho).unwrap();
    let broad = work_meter_nonselective(p, &pure(1e4), rho).unwrap();
    let u = p.propagator();
    let free = u * rho.matrix() * u.adjoint();
    (
        (sharp.matrix() - pem.matrix()).camax(),
        (broad.matrix() - free).camax(),
    )
}

fn tmh() -> Verdict {
    let mut rng = StdRng::seed_from_u64(99);
    let mut worst = 0.0f64;
    let mut negatives = 0;
    let mut noncommuting = 0;
    for _ in 0..100 {
        let dim = rng.random_range(2..=5);
        let inst = random_instance(&mut rng, dim, 0.1, 1.0);
        let (p, rho) = (&inst.protocol, &inst.rho);
        let t = tmh_quasi_pdf(p, rho).unwrap();
        let untouched = untouched_average_work(p, rho).unwrap();
        worst = worst.max((t.mean() - untouched).abs());
        if rho.commutator_defect(p.initial_hamiltonian()) > 1e-8 {
            noncommuting += 1;
            if t.min_weight() < -atom_tolerance(1.0) {
                negatives += 1;
            }
        }
    }
    Verdict::new(
        worst <= 1e-10 && negatives > 0,
        format!(
            "TMH quasi-probability: mean vs untouched {worst:.2e} (tol 1e-10), {negatives} of {noncommuting} non-commuting instances carry a negative weight"
        ),
    )
}

fn main() -> ExitCode {
    type Criterion = (&'static str, fn() -> Verdict);
    let criteria: [Criterion; 8] = [
        ("1", closed_form),
        ("2", peaks),
        ("3", mean_limits),
        ("4", imprecise),
        ("5", fluctuation),
        ("6", oracle),
        ("7", channels),
        ("8", tmh),
    ];
    let mut passed = 0;
    for (id, run) in criteria {
        let v = run();
        println!("criterion {id}: {} {}", if v.pass { "PASS" } else { "FAIL" }, v.summary);
        for d in &v.details {
            println!("    {d}");
        }
        passed += v.pass as usize;
    }
    println!("acceptance: {passed}/{} criteria pass", criteria.len());
    if passed == criteria.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
