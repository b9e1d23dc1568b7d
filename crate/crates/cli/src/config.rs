//! Experiment configuration files.

use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use qwork::qwork_core::json::{density_from_json, hermitian_from_json, MatrixJson, PointerJson};
use qwork::qwork_core::{Complex, DensityMatrix, GaussianPointer, HermitianOperator, Protocol, Schedule, Segment};
use qwork::spin::LevelOrder;
use qwork::{Grid, SpinQuench};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub system: SystemConfig,
    #[serde(default)]
    pub pointer: Option<PointerJson>,
    #[serde(default)]
    pub scheme: Option<SchemeName>,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub sweep: Option<SweepConfig>,
    #[serde(default)]
    pub verify: Option<VerifyConfig>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    #[serde(default)]
    pub hamiltonians: Option<HamiltoniansConfig>,
    #[serde(default)]
    pub initial_state: Option<MatrixJson>,
    /// Inverse temperature of a canonical initial state.
    #[serde(default)]
    pub canonical: Option<f64>,
    #[serde(default)]
    pub two_level: Option<TwoLevelConfig>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HamiltoniansConfig {
    pub initial: MatrixJson,
    #[serde(rename = "final")]
    pub final_hamiltonian: MatrixJson,
    /// Constant-Hamiltonian segments between the two switches; empty means a
    /// sudden quench.
    #[serde(default)]
    pub schedule: Vec<SegmentConfig>,
    #[serde(default = "one")]
    pub hbar: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentConfig {
    pub hamiltonian: MatrixJson,
    pub duration: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwoLevelConfig {
    #[serde(default = "default_p")]
    pub p: f64,
    #[serde(default)]
    pub q_re: f64,
    #[serde(default)]
    pub q_im: f64,
    #[serde(default = "one")]
    pub eps_i: f64,
    #[serde(default = "two")]
    pub eps_f: f64,
    #[serde(default)]
    pub order: OrderName,
}

impl Default for TwoLevelConfig {
    fn default() -> Self {
        Self {
            p: default_p(),
            q_re: 0.0,
            q_im: 0.0,
            eps_i: 1.0,
            eps_f: 2.0,
            order: OrderName::GroundFirst,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderName {
    #[default]
    GroundFirst,
    SigmaZ,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeName {
    Pem,
    TwoGaussian,
    WorkMeter,
    Imprecise,
    Tmh,
}

impl SchemeName {
    pub fn needs_pointer(self) -> bool {
        !matches!(self, SchemeName::Pem | SchemeName::Tmh)
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default)]
    pub grid: Option<GridConfig>,
    #[serde(default)]
    pub format: Format,
    /// File name inside the output directory.
    #[serde(default)]
    pub path: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl GridConfig {
    pub fn validate(&self, field: &str) -> Result<Grid<f64>> {
        if !(self.lo.is_finite() && self.hi.is_finite() && self.lo < self.hi) {
            bail!("{field}: need finite lo < hi, got [{}, {}]", self.lo, self.hi);
        }
        if self.points < 2 {
            bail!("{field}.points: need at least 2, got {}", self.points);
        }
        Ok(Grid::new(self.lo, self.hi, self.points))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// Log-spaced `σ_e²` sweep.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default = "sweep_lo")]
    pub lo: f64,
    #[serde(default = "sweep_hi")]
    pub hi: f64,
    #[serde(default = "sweep_points")]
    pub points: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            lo: sweep_lo(),
            hi: sweep_hi(),
            points: sweep_points(),
        }
    }
}

impl SweepConfig {
    pub fn values(&self) -> Result<Vec<f64>> {
        if !(self.lo > 0.0 && self.hi > self.lo && self.hi.is_finite()) {
            bail!("sweep: need 0 < lo < hi, got [{}, {}]", self.lo, self.hi);
        }
        if self.points < 2 {
            bail!("sweep.points: need at least 2, got {}", self.points);
        }
        let (a, b) = (self.lo.log10(), self.hi.log10());
        let n = self.points - 1;
        Ok((0..=n).map(|k| 10f64.powf(a + (b - a) * k as f64 / n as f64)).collect())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckName {
    ModifiedJarzynski,
    Crooks,
    ModifiedCrooks,
    OracleCompare,
    Resolution,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    #[serde(default = "default_checks")]
    pub checks: Vec<CheckName>,
    /// Grid points of the oracle simulation.
    #[serde(default = "oracle_points")]
    pub oracle_points: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            checks: default_checks(),
            oracle_points: oracle_points(),
        }
    }
}

fn one() -> f64 {
    1.0
}
fn two() -> f64 {
    2.0
}
fn default_p() -> f64 {
    0.7
}
fn sweep_lo() -> f64 {
    1e-6
}
fn sweep_hi() -> f64 {
    1e4
}
fn sweep_points() -> usize {
    101
}
fn oracle_points() -> usize {
    1 << 14
}
fn default_checks() -> Vec<CheckName> {
    vec![
        CheckName::ModifiedJarzynski,
        CheckName::Crooks,
        CheckName::OracleCompare,
        CheckName::Resolution,
    ]
}

/// Parsed configuration together with its raw JSON for the run sidecar.
pub struct Loaded {
    pub config: ExperimentConfig,
    pub raw: serde_json::Value,
}

pub fn load(path: &Path) -> Result<Loaded> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    parse(&text).with_context(|| format!("in config {}", path.display()))
}

pub fn parse(text: &str) -> Result<Loaded> {
    let raw: serde_json::Value = serde_json::from_str(text).context("config is not valid JSON")?;
    let config: ExperimentConfig = serde_path_to_error::deserialize(&raw).map_err(|e| {
        let path = e.path().to_string();
        anyhow!("{path}: {}", e.into_inner())
    })?;
    Ok(Loaded { config, raw })
}

/// A resolved system: protocol, initial state and, when canonical, `β`.
pub struct System {
    pub protocol: Protocol<f64>,
    pub rho: DensityMatrix<f64>,
    pub beta: Option<f64>,
}

impl SystemConfig {
    pub fn build(&self) -> Result<System> {
        match (&self.two_level, &self.hamiltonians) {
            (Some(_), Some(_)) => bail!("system: give either two_level or hamiltonians, not both"),
            (None, None) => self.with_two_level(TwoLevelConfig::default()),
            (Some(t), None) => {
                if self.initial_state.is_some() {
                    bail!("system.initial_state: not used with two_level; set p and q_re/q_im instead");
                }
                self.with_two_level(*t)
            }
            (None, Some(h)) => self.with_hamiltonians(h),
        }
    }

    pub fn two_level_or_default(&self) -> Result<TwoLevelConfig> {
        if self.hamiltonians.is_some() {
            bail!("system.hamiltonians: this command needs a two_level system");
        }
        Ok(self.two_level.unwrap_or_default())
    }

    fn with_two_level(&self, t: TwoLevelConfig) -> Result<System> {
        let spin = spin_from(&t, self.canonical)?;
        let protocol = spin.protocol().map_err(|e| anyhow!("system.two_level: {e}"))?;
        let rho = spin.state().map_err(|e| anyhow!("system.two_level: {e}"))?;
        Ok(System {
            protocol,
            rho,
            beta: self.canonical,
        })
    }

    fn with_hamiltonians(&self, h: &HamiltoniansConfig) -> Result<System> {
        let h0 = hermitian("system.hamiltonians.initial", &h.initial)?;
        let ht = hermitian("system.hamiltonians.final", &h.final_hamiltonian)?;
        let segments = h
            .schedule
            .iter()
            .enumerate()
            .map(|(k, s)| {
                Ok(Segment {
                    hamiltonian: hermitian(&format!("system.hamiltonians.schedule[{k}].hamiltonian"), &s.hamiltonian)?,
                    duration: s.duration,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let schedule = Schedule::new(segments, h.hbar).map_err(|e| anyhow!("system.hamiltonians.schedule: {e}"))?;
        let protocol = Protocol::from_schedule(h0, ht, schedule).map_err(|e| anyhow!("system.hamiltonians: {e}"))?;
        let rho = match (&self.initial_state, self.canonical) {
            (Some(m), _) => density_from_json(m).map_err(|e| anyhow!("system.initial_state: {e}"))?,
            (None, Some(beta)) => DensityMatrix::canonical(protocol.initial_hamiltonian(), beta)
                .map_err(|e| anyhow!("system.canonical: {e}"))?,
            (None, None) => bail!("system: give initial_state or canonical"),
        };
        if rho.dim() != protocol.dim() {
            bail!(
                "system.initial_state: dimension {} does not match the Hamiltonians ({})",
                rho.dim(),
                protocol.dim()
            );
        }
        Ok(System {
            protocol,
            rho,
            beta: self.canonical,
        })
    }
}

fn hermitian(field: &str, m: &MatrixJson) -> Result<HermitianOperator<f64>> {
    hermitian_from_json(m).map_err(|e| anyhow!("{field}: {e}"))
}

/// Spin quench with `p` replaced by the Boltzmann population when `beta`
/// is given.
pub fn spin_from(t: &TwoLevelConfig, beta: Option<f64>) -> Result<SpinQuench> {
    let order = match t.order {
        OrderName::GroundFirst => LevelOrder::GroundFirst,
        OrderName::SigmaZ => LevelOrder::SigmaZ,
    };
    let p = match beta {
        None => t.p,
        Some(b) => {
            if !(b >= 0.0 && b.is_finite()) {
                bail!("system.canonical: beta must be finite and non-negative, got {b}");
            }
            let ground = 1.0 / (1.0 + (-b * t.eps_i).exp());
            match order {
                LevelOrder::GroundFirst => ground,
                LevelOrder::SigmaZ => 1.0 - ground,
            }
        }
    };
    let spin = SpinQuench::new(p, Complex::new(t.q_re, t.q_im), t.eps_i, t.eps_f).map_err(|e| anyhow!("system.two_level: {e}"))?;
    Ok(spin.with_order(order))
}

pub fn pointer(cfg: &ExperimentConfig, fallback_sigma_e2: Option<f64>) -> Result<GaussianPointer<f64>> {
    match (&cfg.pointer, fallback_sigma_e2) {
        (Some(p), _) => p.build().map_err(|e| anyhow!("pointer: {e}")),
        (None, Some(s2)) => Ok(GaussianPointer::pure_with_sigma_e2(s2)?),
        (None, None) => bail!("pointer: required for this command"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn errors_name_the_field() {
        let e = parse(r#"{"system": {"two_level": {"p": "high"}}}"#).err().unwrap();
        assert!(format!("{e:#}").contains("system.two_level.p"), "{e:#}");
        let e = parse(r#"{"sytem": {}}"#).err().unwrap();
        assert!(format!("{e:#}").contains("sytem"), "{e:#}");
    }

    #[test]
    fn semantic_errors_name_the_field() {
        let cfg = parse(r#"{"system": {"two_level": {"p": 1.5}}}"#).unwrap().config;
        let e = cfg.system.build().err().unwrap();
        assert!(format!("{e:#}").starts_with("system.two_level"), "{e:#}");
        let cfg = parse(r#"{"system": {"hamiltonians": {"initial": [[1, 2], [0, 1]], "final": [[1, 0], [0, 1]]}, "canonical": 1}}"#)
            .unwrap()
            .config;
        let e = cfg.system.build().err().unwrap();
        assert!(format!("{e:#}").starts_with("system.hamiltonians.initial"), "{e:#}");
    }

    #[test]
    fn canonical_two_level_population() {
        let t = TwoLevelConfig::default();
        let s = spin_from(&t, Some(1.0)).unwrap();
        assert!((s.p - 1.0 / (1.0 + (-1.0f64).exp())).abs() < 1e-15);
        let s = spin_from(&TwoLevelConfig { order: OrderName::SigmaZ, ..t }, Some(1.0)).unwrap();
        assert!((s.p - 1.0 / (1.0 + 1.0f64.exp())).abs() < 1e-15);
    }

    #[test]
    fn sweep_is_log_spaced() {
        let v = SweepConfig { lo: 1e-2, hi: 1e2, points: 5 }.values().unwrap();
        for (a, b) in v.iter().zip([1e-2, 1e-1, 1.0, 1e1, 1e2]) {
            assert!((a / b - 1.0).abs() < 1e-12);
        }
    }
}
