//! work-pdf, average-sweep, oracle-compare and verify.

use anyhow::{anyhow, bail, Result};
use qwork::channels::atom_tolerance;
use qwork::fluctuation::crooks_violation;
use qwork::qwork_core::{untouched_average_work, DensityMatrix, GaussianPointer, Protocol};
use qwork::{
    build_backward, crooks_check, imprecise_limit_pdf, mean_work, modified_crooks_check, modified_jarzynski,
    pem_work_pdf, resolution_check_for, tmh_quasi_pdf, two_gaussian_work_pdf, work_meter_pdf, AtomDistribution,
    GaussianMixture, ProcessPair, WorkInstance,
};
use qwork_oracle::{simulate_two_measurements, simulate_work_meter, two_measurement_grid, work_meter_grid};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{pointer, CheckName, ExperimentConfig, SchemeName, System, VerifyConfig};
use crate::output::{atoms_columns, Writer};

pub const ORACLE_TOLERANCE: f64 = 1e-6;
pub const JARZYNSKI_TOLERANCE: f64 = 1e-10;

fn file_name(cfg: &ExperimentConfig, stem: &str) -> String {
    cfg.output
        .path
        .clone()
        .unwrap_or_else(|| format!("{stem}.{}", cfg.output.format.extension()))
}

pub fn work_pdf(cfg: &ExperimentConfig, out: &mut Writer) -> Result<Value> {
    let sys = cfg.system.build()?;
    let scheme = cfg.scheme.unwrap_or(SchemeName::WorkMeter);
    let name = file_name(cfg, "work_pdf");
    let format = cfg.output.format;
    if !scheme.needs_pointer() {
        let atoms = match scheme {
            SchemeName::Pem => pem_work_pdf(&sys.protocol, &sys.rho)?,
            _ => tmh_quasi_pdf(&sys.protocol, &sys.rho)?,
        };
        let (w, weight) = atoms_columns(&atoms);
        let record = atoms.to_record();
        out.write_columns(&name, format, &[("w", &w), ("weight", &weight)], Some(json!({ "distribution": record })))?;
        return Ok(json!({ "scheme": scheme, "atoms": w.len(), "mean": atoms.mean() }));
    }
    let ptr = pointer(cfg, None)?;
    let m = mixture(scheme, &sys.protocol, &ptr, &sys.rho)?;
    let grid = match &cfg.output.grid {
        Some(g) => g.validate("output.grid")?,
        None => m.default_grid(),
    };
    let ws = grid.values();
    let pdf = m.evaluate_many(&ws);
    out.write_columns(&name, format, &[("w", &ws), ("pdf", &pdf)], Some(json!({ "distribution": m.to_record() })))?;
    Ok(json!({ "scheme": scheme, "mean": m.mean(), "variance": m.variance(), "sigma_e2": ptr.sigma_e2(), "sigma_nd2": ptr.sigma_nd2() }))
}

fn mixture(
    scheme: SchemeName,
    p: &Protocol<f64>,
    ptr: &GaussianPointer<f64>,
    rho: &DensityMatrix<f64>,
) -> Result<GaussianMixture<f64>> {
    Ok(match scheme {
        SchemeName::WorkMeter => work_meter_pdf(p, ptr, rho)?,
        SchemeName::TwoGaussian => two_gaussian_work_pdf(p, ptr, rho)?,
        SchemeName::Imprecise => imprecise_limit_pdf(p, ptr, rho)?,
        other => bail!("scheme: {other:?} is not a Gaussian mixture"),
    })
}

/// The configured pointer rescaled in `κ` to reach `σ_e²`, or a pure one.
fn pointer_at(shape: Option<&GaussianPointer<f64>>, sigma_e2: f64) -> Result<GaussianPointer<f64>> {
    match shape {
        Some(p) => Ok(p.with_kappa((p.var_x() / sigma_e2).sqrt())?),
        None => Ok(GaussianPointer::pure_with_sigma_e2(sigma_e2)?),
    }
}

pub fn average_sweep(cfg: &ExperimentConfig, out: &mut Writer) -> Result<Value> {
    let sys = cfg.system.build()?;
    let shape = match &cfg.pointer {
        Some(_) => Some(pointer(cfg, None)?),
        None => None,
    };
    let sweep = cfg.sweep.unwrap_or_default().values()?;
    let means = sweep
        .par_iter()
        .map(|&s2| Ok(mean_work(&sys.protocol, &pointer_at(shape.as_ref(), s2)?, &sys.rho)?))
        .collect::<Result<Vec<f64>>>()?;
    let small = pem_work_pdf(&sys.protocol, &sys.rho)?.mean();
    let large = untouched_average_work(&sys.protocol, &sys.rho)?;
    let limits = json!({ "small_width_limit": small, "large_width_limit": large });
    out.write_columns(
        &file_name(cfg, "average_sweep"),
        cfg.output.format,
        &[("sigma_e2", &sweep), ("mean", &means)],
        Some(json!({ "limits": limits })),
    )?;
    Ok(limits)
}

struct Comparison {
    l1: f64,
    w: Vec<f64>,
    analytic: Vec<f64>,
    oracle: Vec<f64>,
}

/// L1 distance between the analytic pdf and the grid simulation; the
/// analytic side is optionally perturbed.
fn oracle_l1(sys: &System, ptr: &GaussianPointer<f64>, scheme: SchemeName, points: usize, perturb: Option<f64>) -> Result<Comparison> {
    let (p, rho) = (&sys.protocol, &sys.rho);
    let sim = match scheme {
        SchemeName::WorkMeter => simulate_work_meter(p, ptr, rho, &work_meter_grid(p, ptr, points)?)?,
        SchemeName::TwoGaussian => simulate_two_measurements(p, ptr, rho, &two_measurement_grid(p, ptr, points)?)?,
        other => bail!("scheme: oracle comparison supports work_meter and two_gaussian, got {other:?}"),
    };
    let mut m = mixture(scheme, p, ptr, rho)?;
    if let Some(d) = perturb {
        perturb_mixture(&mut m, d);
    }
    let analytic = m.evaluate_many(&sim.w);
    let l1 = sim.l1_to(|w| m.evaluate(w));
    Ok(Comparison {
        l1,
        w: sim.w,
        analytic,
        oracle: sim.pdf,
    })
}

fn perturb_mixture(m: &mut GaussianMixture<f64>, delta: f64) {
    if let Some(t) = m.terms.iter_mut().max_by(|a, b| a.weight.norm().partial_cmp(&b.weight.norm()).unwrap()) {
        t.weight *= 1.0 + delta;
    }
}

fn perturb_atoms(d: &mut AtomDistribution<f64>, delta: f64) {
    if let Some(a) = d.atoms.iter_mut().max_by(|a, b| a.1.abs().partial_cmp(&b.1.abs()).unwrap()) {
        a.1 *= 1.0 + delta;
    }
}

pub fn oracle_compare(cfg: &ExperimentConfig, out: &mut Writer, points: usize) -> Result<(bool, Value)> {
    let sys = cfg.system.build()?;
    let ptr = pointer(cfg, None)?;
    let scheme = cfg.scheme.unwrap_or(SchemeName::WorkMeter);
    let Comparison { l1, w, analytic, oracle } = oracle_l1(&sys, &ptr, scheme, points, None)?;
    out.write_columns(
        &file_name(cfg, "oracle_compare"),
        cfg.output.format,
        &[("w", &w), ("analytic", &analytic), ("oracle", &oracle)],
        Some(json!({ "l1": l1 })),
    )?;
    let pass = l1 <= ORACLE_TOLERANCE;
    println!(
        "{} oracle-compare {scheme:?}: L1 = {l1:.3e} (tol {ORACLE_TOLERANCE:e}, {points} points)",
        verdict(pass)
    );
    Ok((pass, json!({ "scheme": scheme, "l1": l1, "tolerance": ORACLE_TOLERANCE, "points": points, "pass": pass })))
}

#[derive(Serialize)]
struct CheckResult {
    name: String,
    value: f64,
    tolerance: Option<f64>,
    pass: bool,
    details: Value,
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

fn require_beta(sys: &System, check: &str) -> Result<f64> {
    sys.beta
        .ok_or_else(|| anyhow!("system.canonical: an inverse temperature is required for {check}"))
}

pub fn verify(cfg: &ExperimentConfig, out: &mut Writer, perturb: Option<f64>) -> Result<(bool, Value)> {
    let sys = cfg.system.build()?;
    let ptr = pointer(cfg, Some(0.1))?;
    let vc = cfg.verify.clone().unwrap_or_default();
    let results = vc
        .checks
        .iter()
        .map(|&c| run_check(c, &sys, &ptr, &vc, perturb))
        .collect::<Result<Vec<_>>>()?;
    let pass = results.iter().all(|r| r.pass);
    for r in &results {
        match r.tolerance {
            Some(t) => println!("{} {}: {:.3e} (tol {t:e})", verdict(r.pass), r.name, r.value),
            None => println!("INFO {}: {}", r.name, r.details),
        }
    }
    let report = json!({ "pass": pass, "perturb_weight": perturb, "checks": results });
    out.write_json(&file_name_json(cfg, "verify_report"), &report)?;
    Ok((pass, json!({ "pass": pass })))
}

fn file_name_json(cfg: &ExperimentConfig, stem: &str) -> String {
    cfg.output.path.clone().unwrap_or_else(|| format!("{stem}.json"))
}

fn run_check(
    check: CheckName,
    sys: &System,
    ptr: &GaussianPointer<f64>,
    vc: &VerifyConfig,
    perturb: Option<f64>,
) -> Result<CheckResult> {
    let (p, rho) = (&sys.protocol, &sys.rho);
    Ok(match check {
        CheckName::ModifiedJarzynski => {
            let beta = require_beta(sys, "modified_jarzynski")?;
            let r = modified_jarzynski(p, ptr, rho, beta)?;
            let deviation = match perturb {
                None => r.ratio_deviation,
                Some(d) => {
                    let mut m = work_meter_pdf(p, ptr, rho)?;
                    perturb_mixture(&mut m, d);
                    (m.log_exp_moment(beta)? - r.log_rhs).exp_m1().abs()
                }
            };
            CheckResult {
                name: "modified_jarzynski".into(),
                value: deviation,
                tolerance: Some(JARZYNSKI_TOLERANCE),
                pass: deviation <= JARZYNSKI_TOLERANCE,
                details: json!({ "lhs": r.lhs, "rhs": r.rhs, "beta": beta, "sigma_e2": ptr.sigma_e2() }),
            }
        }
        CheckName::Crooks | CheckName::ModifiedCrooks => {
            let beta = require_beta(sys, "crooks")?;
            let backward = build_backward(p)?;
            let rb = DensityMatrix::canonical(backward.initial_hamiltonian(), beta)?;
            let pair = ProcessPair::new(p.clone(), rho.clone(), backward, rb, beta)?;
            let report = if check == CheckName::ModifiedCrooks {
                modified_crooks_check(&pair, ptr.sigma_e2())?
            } else {
                let mut r = crooks_check(&pair)?;
                if let Some(d) = perturb {
                    let mut f = pem_work_pdf(&pair.forward, &pair.forward_state)?;
                    perturb_atoms(&mut f, d);
                    let b = pem_work_pdf(&pair.backward, &pair.backward_state)?;
                    let merge = atom_tolerance(WorkInstance::new(p, rho)?.spectral_scale());
                    r.max_violation = crooks_violation(&f, &b, beta, pair.beta_delta_f, merge).0;
                    r.pass = r.max_violation <= r.threshold;
                }
                r
            };
            CheckResult {
                name: report.relation.clone(),
                value: report.max_violation,
                tolerance: Some(report.threshold),
                pass: report.pass,
                details: json!({ "beta": beta, "beta_delta_f": pair.beta_delta_f }),
            }
        }
        CheckName::OracleCompare => {
            let mut worst = 0.0f64;
            let mut per = serde_json::Map::new();
            for scheme in [SchemeName::WorkMeter, SchemeName::TwoGaussian] {
                let l1 = oracle_l1(sys, ptr, scheme, vc.oracle_points, perturb)?.l1;
                per.insert(format!("{scheme:?}"), json!(l1));
                worst = worst.max(l1);
            }
            CheckResult {
                name: "oracle_compare".into(),
                value: worst,
                tolerance: Some(ORACLE_TOLERANCE),
                pass: worst <= ORACLE_TOLERANCE,
                details: Value::Object(per),
            }
        }
        CheckName::Resolution => {
            let r = resolution_check_for(p, ptr, rho)?;
            CheckResult {
                name: "resolution".into(),
                value: f64::NAN,
                tolerance: None,
                pass: true,
                details: json!({ "accurate_limit": r.accurate_limit, "imprecise_limit": r.imprecise_limit }),
            }
        }
    })
}
