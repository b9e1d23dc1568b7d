//! Curves, mean sweeps and imprecise-limit comparisons for the spin quench, in units of `ε_i`.

use anyhow::Result;
use qwork::qwork_core::{untouched_average_work, Complex, GaussianPointer};
use qwork::{imprecise_limit_pdf, mean_work, pem_work_pdf, work_meter_pdf, Grid, SpinQuench};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{spin_from, ExperimentConfig};
use crate::output::{scaled_mixture_record, Writer};

struct Curve {
    name: String,
    q: f64,
    sigma_e2: f64,
    pdf: Vec<f64>,
    record: Value,
}

fn with_q(base: &SpinQuench, q: f64) -> Result<SpinQuench> {
    Ok(SpinQuench::new(base.p, Complex::new(q, 0.0), base.eps_i, base.eps_f)?.with_order(base.order))
}

fn pointer(sigma_e2: f64, unit: f64) -> Result<GaussianPointer<f64>> {
    Ok(GaussianPointer::pure_with_sigma_e2(sigma_e2 * unit * unit)?)
}

fn label(q: f64, qmax: f64) -> &'static str {
    match q / qmax {
        r if r > 0.75 => "qplus",
        r if r > 0.25 => "qhalfplus",
        r if r < -0.75 => "qminus",
        r if r < -0.25 => "qhalfminus",
        _ => "q0",
    }
}

pub fn run(cfg: &ExperimentConfig, out: &mut Writer) -> Result<Value> {
    let t = cfg.system.two_level_or_default()?;
    let base = spin_from(&t, cfg.system.canonical)?;
    let unit = base.eps_i;
    let grid = match &cfg.output.grid {
        Some(g) => g.validate("output.grid")?,
        None => Grid::new(-4.0, 4.0, 1601),
    };
    let us = grid.values();
    let ws: Vec<f64> = us.iter().map(|u| u * unit).collect();
    let format = cfg.output.format;
    let ext = format.extension();
    let qmax = (base.p * (1.0 - base.p)).sqrt();

    let specs: Vec<(f64, f64)> = vec![(0.0, 0.01), (0.0, 0.1), (0.0, 1.0), (qmax, 0.1), (-qmax, 0.1)];
    let curves = specs
        .par_iter()
        .map(|&(q, s2)| {
            let s = with_q(&base, q)?;
            let m = work_meter_pdf(&s.protocol()?, &pointer(s2, unit)?, &s.state()?)?;
            Ok(Curve {
                name: format!("pdf_{}_se2_{s2}.{ext}", label(q, qmax)),
                q,
                sigma_e2: s2,
                pdf: m.evaluate_many(&ws).into_iter().map(|p| p * unit).collect(),
                record: serde_json::to_value(scaled_mixture_record(&m, unit))?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut pdf_meta = Vec::new();
    for c in &curves {
        out.write_columns(&c.name, format, &[("w", &us), ("pdf", &c.pdf)], Some(json!({ "distribution": c.record })))?;
        pdf_meta.push(json!({ "file": c.name, "q": c.q, "sigma_e2": c.sigma_e2, "distribution": c.record }));
    }

    let sweep = cfg.sweep.unwrap_or_default().values()?;
    let qs = [qmax, 0.5 * qmax, 0.0, -0.5 * qmax, -qmax];
    let rows = qs
        .par_iter()
        .map(|&q| {
            let s = with_q(&base, q)?;
            let (p, rho) = (s.protocol()?, s.state()?);
            let means = sweep
                .iter()
                .map(|&s2| Ok(mean_work(&p, &pointer(s2, unit)?, &rho)? / unit))
                .collect::<Result<Vec<f64>>>()?;
            let small = pem_work_pdf(&p, &rho)?.mean() / unit;
            let large = untouched_average_work(&p, &rho)? / unit;
            Ok((q, means, small, large))
        })
        .collect::<Result<Vec<_>>>()?;
    let (mut qcol, mut scol, mut mcol) = (Vec::new(), Vec::new(), Vec::new());
    let mut asymptotes = Vec::new();
    for (q, means, small, large) in &rows {
        for (s2, m) in sweep.iter().zip(means) {
            qcol.push(*q);
            scol.push(*s2);
            mcol.push(*m);
        }
        asymptotes.push(json!({ "q": q, "small_width_limit": small, "large_width_limit": large }));
    }
    let sweep_name = format!("mean_vs_se2.{ext}");
    out.write_columns(
        &sweep_name,
        format,
        &[("q", &qcol), ("sigma_e2", &scol), ("mean", &mcol)],
        Some(json!({ "asymptotes": asymptotes })),
    )?;

    let s = with_q(&base, qmax)?;
    let (p, rho) = (s.protocol()?, s.state()?);
    let mut imprecise_meta = Vec::new();
    for s2 in [1.0, 2.0] {
        let ptr = pointer(s2, unit)?;
        let exact = work_meter_pdf(&p, &ptr, &rho)?;
        let limit = imprecise_limit_pdf(&p, &ptr, &rho)?;
        let e: Vec<f64> = exact.evaluate_many(&ws).into_iter().map(|v| v * unit).collect();
        let l: Vec<f64> = limit.evaluate_many(&ws).into_iter().map(|v| v * unit).collect();
        let name = format!("imprecise_se2_{s2}.{ext}");
        let records = json!({
            "exact": scaled_mixture_record(&exact, unit),
            "imprecise": scaled_mixture_record(&limit, unit),
        });
        out.write_columns(&name, format, &[("w", &us), ("exact", &e), ("imprecise", &l)], Some(records.clone()))?;
        imprecise_meta.push(json!({ "file": name, "q": qmax, "sigma_e2": s2, "distributions": records }));
    }

    let mut lines: Vec<f64> = base.projective_work_values().iter().map(|w| w / unit).collect();
    lines.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let meta = json!({
        "energy_unit": "eps_i",
        "parameters": { "p": base.p, "eps_i": base.eps_i, "eps_f": base.eps_f, "order": t.order },
        "vertical_lines": lines,
        "pdfs": pdf_meta,
        "mean_sweep": { "file": sweep_name, "asymptotes": asymptotes },
        "imprecise": imprecise_meta,
    });
    out.write_json("spin_quench.json", &meta)?;
    Ok(json!({ "vertical_lines": lines, "mean_asymptotes": asymptotes }))
}
