//! Complex-centered Gaussian mixtures and discrete (possibly signed) atom
//! distributions.
//!
//! A term `(a, c, v)` stands for `a N(w; c, v)` with `N` the normal density
//! analytically continued to a complex center `c`. Its integral over the
//! real line is `a`, so the mixture mass is `Σ a`.

use num_complex::Complex;
use qwork_core::error::{Error, Result};
use qwork_core::scalar::{cexp, lit, to_f64, tol, Real};
use serde::{Deserialize, Serialize};

/// Measurement scheme that produced a distribution.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Pem,
    WorkMeter,
    TwoGaussian,
    Imprecise,
    ImpreciseQ,
    BroadGaussian,
    Tmh,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::Pem => "pem",
            Scheme::WorkMeter => "work_meter",
            Scheme::TwoGaussian => "two_gaussian",
            Scheme::Imprecise => "imprecise",
            Scheme::ImpreciseQ => "imprecise_q",
            Scheme::BroadGaussian => "broad_gaussian",
            Scheme::Tmh => "tmh",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MixtureTerm<T: Real> {
    pub weight: Complex<T>,
    pub center: Complex<T>,
    pub variance: T,
}

impl<T: Real> MixtureTerm<T> {
    /// `weight · N(w; center, variance)`.
    pub fn density(&self, w: T) -> Complex<T> {
        let d = Complex::new(w, T::zero()) - self.center;
        let norm = (T::two_pi() * self.variance).sqrt().recip();
        self.weight * cexp(-(d * d) / Complex::new(lit::<T>(2.0) * self.variance, T::zero())) * norm
    }

    /// `∫ w^k N(w; c, v) dw` by `m_k = c m_{k-1} + (k-1) v m_{k-2}`.
    pub fn raw_moment(&self, k: u32) -> Complex<T> {
        let v = Complex::new(self.variance, T::zero());
        let (mut prev, mut cur) = (Complex::new(T::zero(), T::zero()), Complex::new(T::one(), T::zero()));
        for j in 1..=k {
            let next = self.center * cur + v * prev * lit::<T>((j - 1) as f64);
            prev = cur;
            cur = next;
        }
        self.weight * cur
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GaussianMixture<T: Real> {
    pub scheme: Scheme,
    pub terms: Vec<MixtureTerm<T>>,
    pub sigma_e2: T,
    pub sigma_nd2: Option<T>,
}

impl<T: Real> GaussianMixture<T> {
    pub fn new(scheme: Scheme, terms: Vec<MixtureTerm<T>>, sigma_e2: T, sigma_nd2: Option<T>) -> Self {
        Self {
            scheme,
            terms,
            sigma_e2,
            sigma_nd2,
        }
    }

    pub fn evaluate_complex(&self, w: T) -> Complex<T> {
        self.terms
            .iter()
            .fold(Complex::new(T::zero(), T::zero()), |acc, t| acc + t.density(w))
    }

    /// Real density; the imaginary residue cancels between conjugate terms.
    pub fn evaluate(&self, w: T) -> T {
        self.evaluate_complex(w).re
    }

    pub fn evaluate_many(&self, ws: &[T]) -> Vec<T> {
        ws.iter().map(|&w| self.evaluate(w)).collect()
    }

    /// `dp/dw`.
    pub fn derivative(&self, w: T) -> T {
        self.terms
            .iter()
            .fold(Complex::new(T::zero(), T::zero()), |acc, t| {
                let d = Complex::new(w, T::zero()) - t.center;
                acc - t.density(w) * d / Complex::new(t.variance, T::zero())
            })
            .re
    }

    /// Total mass `Σ Re a`.
    pub fn integral(&self) -> T {
        self.terms.iter().fold(T::zero(), |acc, t| acc + t.weight.re)
    }

    /// `∫ w^k p(w) dw`, term by term.
    pub fn moment(&self, k: u32) -> T {
        self.terms
            .iter()
            .fold(Complex::new(T::zero(), T::zero()), |acc, t| acc + t.raw_moment(k))
            .re
    }

    pub fn mean(&self) -> T {
        self.moment(1) / self.integral()
    }

    pub fn variance(&self) -> T {
        let m = self.mean();
        self.moment(2) / self.integral() - m * m
    }

    /// `ln ⟨e^{-βw}⟩` from `Σ a exp(-βc + β²v/2)`, evaluated relative to the
    /// largest exponent so neither factor overflows.
    pub fn log_exp_moment(&self, beta: T) -> Result<T> {
        let half: T = lit(0.5);
        let exps: Vec<Complex<T>> = self
            .terms
            .iter()
            .map(|t| -t.center * beta + Complex::new(half * beta * beta * t.variance, T::zero()))
            .collect();
        let top = exps.iter().fold(T::min_value().unwrap(), |a, z| a.max(z.re));
        let sum = self
            .terms
            .iter()
            .zip(&exps)
            .fold(Complex::new(T::zero(), T::zero()), |acc, (t, z)| {
                acc + t.weight * cexp(*z - Complex::new(top, T::zero()))
            });
        if !(sum.re > T::zero()) {
            return Err(Error::Numeric(format!("exponential moment is not positive ({})", sum.re)));
        }
        Ok(top + sum.re.ln())
    }

    pub fn exp_moment(&self, beta: T) -> Result<T> {
        Ok(self.log_exp_moment(beta)?.exp())
    }

    /// `G(u) = Σ a exp(iuc - v u²/2)` as one complex exponent per term.
    pub fn characteristic(&self, u: T) -> Complex<T> {
        let i = Complex::new(T::zero(), T::one());
        let half: T = lit(0.5);
        self.terms
            .iter()
            .fold(Complex::new(T::zero(), T::zero()), |acc, t| {
                acc + t.weight * cexp(i * t.center * u - Complex::new(half * t.variance * u * u, T::zero()))
            })
    }

    /// Largest `|Im p(w)|` relative to `max(1, |Re p(w)|)` over `ws`.
    pub fn imaginary_residue(&self, ws: &[T]) -> T {
        ws.iter().fold(T::zero(), |acc, &w| {
            let z = self.evaluate_complex(w);
            acc.max(z.im.abs() / T::one().max(z.re.abs()))
        })
    }

    /// Every term has its conjugate partner (or is self-conjugate) within `t`.
    pub fn is_conjugation_closed(&self, t: T) -> bool {
        self.terms.iter().all(|a| {
            self.terms.iter().any(|b| {
                let dw = a.weight - b.weight.conj();
                let dc = a.center - b.center.conj();
                dw.norm_sqr().sqrt() <= t && dc.norm_sqr().sqrt() <= t && (a.variance - b.variance).abs() <= t
            })
        })
    }

    /// Real parts of all centers.
    pub fn centers(&self) -> Vec<T> {
        self.terms.iter().map(|t| t.center.re).collect()
    }

    /// Largest term standard deviation.
    pub fn max_sigma(&self) -> T {
        self.terms.iter().fold(T::zero(), |a, t| a.max(t.variance.sqrt()))
    }

    /// `[min Re c - k σ, max Re c + k σ]`.
    pub fn support(&self, k: T) -> (T, T) {
        let cs = self.centers();
        let lo = cs.iter().fold(T::max_value().unwrap(), |a, &c| a.min(c));
        let hi = cs.iter().fold(T::min_value().unwrap(), |a, &c| a.max(c));
        let s = self.max_sigma();
        (lo - k * s, hi + k * s)
    }

    /// Default evaluation grid: 2001 points over the centers `± 8σ`.
    pub fn default_grid(&self) -> Grid<T> {
        let (lo, hi) = self.support(lit(8.0));
        Grid::new(lo, hi, 2001)
    }

    /// Drops terms whose weight magnitude is below `cutoff`.
    pub fn pruned(&self, cutoff: T) -> Self {
        let mut out = self.clone();
        out.terms.retain(|t| t.weight.norm_sqr().sqrt() > cutoff);
        out
    }

    pub fn to_record(&self) -> DistributionRecord {
        DistributionRecord {
            scheme: self.scheme.name().to_string(),
            terms: Some(
                self.terms
                    .iter()
                    .map(|t| TermRecord {
                        weight: [to_f64(t.weight.re), to_f64(t.weight.im)],
                        center: [to_f64(t.center.re), to_f64(t.center.im)],
                        variance: to_f64(t.variance),
                    })
                    .collect(),
            ),
            atoms: None,
            sigma_e2: Some(to_f64(self.sigma_e2)),
            sigma_nd2: self.sigma_nd2.map(to_f64),
            signed: None,
        }
    }
}

/// Uniform evaluation grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid<T> {
    pub lo: T,
    pub hi: T,
    pub points: usize,
}

impl<T: Real> Grid<T> {
    pub fn new(lo: T, hi: T, points: usize) -> Self {
        assert!(points >= 2 && hi > lo, "grid needs two points on a proper interval");
        Self { lo, hi, points }
    }

    pub fn step(&self) -> T {
        (self.hi - self.lo) / lit((self.points - 1) as f64)
    }

    pub fn values(&self) -> Vec<T> {
        let h = self.step();
        (0..self.points).map(|k| self.lo + h * lit(k as f64)).collect()
    }

    /// Trapezoid integral of samples taken on this grid.
    pub fn trapezoid(&self, samples: &[T]) -> T {
        let h = self.step();
        let n = samples.len();
        let inner = samples.iter().fold(T::zero(), |a, &s| a + s);
        h * (inner - (samples[0] + samples[n - 1]) * lit(0.5))
    }
}

/// Discrete distribution; weights may be negative for quasi-probabilities.
#[derive(Clone, Debug, PartialEq)]
pub struct AtomDistribution<T: Real> {
    pub scheme: Scheme,
    /// `(w, weight)` sorted by `w`.
    pub atoms: Vec<(T, T)>,
    /// Negative weights are admissible for this distribution.
    pub signed: bool,
}

impl<T: Real> AtomDistribution<T> {
    /// Sorts the points and merges those closer than `merge_tol`
    /// (transitively); the merged position is the mean of the group.
    pub fn from_points(scheme: Scheme, mut points: Vec<(T, T)>, merge_tol: T, signed: bool) -> Self {
        points.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite work values"));
        let mut atoms: Vec<(T, T)> = Vec::new();
        let mut group: Vec<(T, T)> = Vec::new();
        let flush = |group: &mut Vec<(T, T)>, atoms: &mut Vec<(T, T)>| {
            if group.is_empty() {
                return;
            }
            let count: T = lit(group.len() as f64);
            let w = group.iter().fold(T::zero(), |a, p| a + p.0) / count;
            let weight = group.iter().fold(T::zero(), |a, p| a + p.1);
            atoms.push((w, weight));
            group.clear();
        };
        for p in points {
            if let Some(last) = group.last() {
                if p.0 - last.0 > merge_tol {
                    flush(&mut group, &mut atoms);
                }
            }
            group.push(p);
        }
        flush(&mut group, &mut atoms);
        Self { scheme, atoms, signed }
    }

    pub fn total(&self) -> T {
        self.atoms.iter().fold(T::zero(), |a, p| a + p.1)
    }

    pub fn moment(&self, k: i32) -> T {
        self.atoms.iter().fold(T::zero(), |a, p| a + p.1 * p.0.powi(k))
    }

    pub fn mean(&self) -> T {
        self.moment(1)
    }

    pub fn min_weight(&self) -> T {
        self.atoms.iter().fold(T::max_value().unwrap(), |a, p| a.min(p.1))
    }

    /// Some weight is below `-1e-12`.
    pub fn has_negative(&self) -> bool {
        self.min_weight() < -tol::<T>(1e-12)
    }

    /// Weight of the atom at `w` (within `t`), zero if absent.
    pub fn weight_at(&self, w: T, t: T) -> T {
        self.atoms
            .iter()
            .filter(|p| (p.0 - w).abs() <= t)
            .fold(T::zero(), |a, p| a + p.1)
    }

    pub fn positions(&self) -> Vec<T> {
        self.atoms.iter().map(|p| p.0).collect()
    }

    /// `⟨e^{-βw}⟩ = Σ weight e^{-βw}`.
    pub fn exp_moment(&self, beta: T) -> T {
        self.atoms.iter().fold(T::zero(), |a, p| a + p.1 * (-beta * p.0).exp())
    }

    /// `Σ_w weight · N(·; w, v)`.
    pub fn convolve_gaussian(&self, variance: T) -> GaussianMixture<T> {
        let terms = self
            .atoms
            .iter()
            .map(|&(w, a)| MixtureTerm {
                weight: Complex::new(a, T::zero()),
                center: Complex::new(w, T::zero()),
                variance,
            })
            .collect();
        GaussianMixture::new(self.scheme, terms, variance, None)
    }

    /// Weight falling in each bin `[edges[k], edges[k+1])`.
    pub fn binned(&self, edges: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); edges.len().saturating_sub(1)];
        for &(w, a) in &self.atoms {
            if let Some(k) = edges.windows(2).position(|e| w >= e[0] && w < e[1]) {
                out[k] += a;
            }
        }
        out
    }

    pub fn to_record(&self) -> DistributionRecord {
        DistributionRecord {
            scheme: self.scheme.name().to_string(),
            terms: None,
            atoms: Some(self.atoms.iter().map(|&(w, a)| [to_f64(w), to_f64(a)]).collect()),
            sigma_e2: None,
            sigma_nd2: None,
            signed: Some(self.signed),
        }
    }
}

/// JSON form of a term.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermRecord {
    pub weight: [f64; 2],
    pub center: [f64; 2],
    pub variance: f64,
}

/// JSON form of any distribution: `{scheme, terms|atoms, sigma_e2, sigma_nd2}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistributionRecord {
    pub scheme: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub terms: Option<Vec<TermRecord>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub atoms: Option<Vec<[f64; 2]>>,
    pub sigma_e2: Option<f64>,
    pub sigma_nd2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub signed: Option<bool>,
}

impl DistributionRecord {
    /// Rebuilds an `f64` mixture from the `terms` field.
    pub fn mixture(&self) -> Option<GaussianMixture<f64>> {
        let terms = self.terms.as_ref()?;
        let scheme = serde_json::from_value(serde_json::Value::String(self.scheme.clone())).ok()?;
        Some(GaussianMixture::new(
            scheme,
            terms
                .iter()
                .map(|t| MixtureTerm {
                    weight: Complex::new(t.weight[0], t.weight[1]),
                    center: Complex::new(t.center[0], t.center[1]),
                    variance: t.variance,
                })
                .collect(),
            self.sigma_e2.unwrap_or(f64::NAN),
            self.sigma_nd2,
        ))
    }
}

/// CSV with header `w,pdf`, one row per grid point.
pub fn to_csv<T: Real>(ws: &[T], pdf: &[T]) -> String {
    let mut s = String::from("w,pdf\n");
    for (w, p) in ws.iter().zip(pdf) {
        s.push_str(&format!("{:.12e},{:.12e}\n", to_f64(*w), to_f64(*p)));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> MixtureTerm<f64> {
        MixtureTerm {
            weight: Complex::new(1.0, 0.0),
            center: Complex::new(0.0, 0.0),
            variance: 1.0,
        }
    }

    #[test]
    fn single_standard_term() {
        let m = GaussianMixture::new(Scheme::WorkMeter, vec![unit()], 1.0, None);
        assert!((m.evaluate(0.0) - (2.0 * std::f64::consts::PI).powf(-0.5)).abs() < 1e-16);
        assert_eq!(m.integral(), 1.0);
        assert_eq!(m.moment(2), 1.0);
        assert_eq!(m.moment(4), 3.0);
        assert!((m.characteristic(0.7) - Complex::new((-0.245f64).exp(), 0.0)).norm() < 1e-15);
        assert!((m.exp_moment(2.0).unwrap() - 2f64.exp()).abs() < 1e-13);
    }

    #[test]
    fn complex_moments_match_quadrature() {
        let a = MixtureTerm {
            weight: Complex::new(0.2, 0.1),
            center: Complex::new(0.5, 0.3),
            variance: 0.8,
        };
        let b = MixtureTerm {
            weight: a.weight.conj(),
            center: a.center.conj(),
            variance: 0.8,
        };
        let m = GaussianMixture::new(Scheme::WorkMeter, vec![a, b, unit()], 0.8, None);
        assert!(m.is_conjugation_closed(0.0));
        let grid = Grid::new(-12.0, 12.0, 4001);
        let ws = grid.values();
        assert!(m.imaginary_residue(&ws) < 1e-15);
        for k in 0..4u32 {
            let samples: Vec<f64> = ws.iter().map(|&w| w.powi(k as i32) * m.evaluate(w)).collect();
            assert!((grid.trapezoid(&samples) - m.moment(k)).abs() < 1e-10, "moment {k}");
        }
        let beta = 0.7;
        let samples: Vec<f64> = ws.iter().map(|&w| (-beta * w).exp() * m.evaluate(w)).collect();
        assert!((grid.trapezoid(&samples) - m.exp_moment(beta).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn log_domain_survives_large_exponents() {
        let t = MixtureTerm {
            weight: Complex::new(1.0, 0.0),
            center: Complex::new(-1000.0, 0.0),
            variance: 1.0,
        };
        let m: GaussianMixture<f64> = GaussianMixture::new(Scheme::WorkMeter, vec![t], 1.0, None);
        assert!((m.log_exp_moment(1.0).unwrap() - 1000.5).abs() < 1e-12);
    }

    #[test]
    fn atoms_merge_and_bin() {
        let d = AtomDistribution::from_points(
            Scheme::Pem,
            vec![(1.0, 0.25), (0.0, 0.5), (1.0 + 1e-12, 0.25)],
            1e-9,
            false,
        );
        assert_eq!(d.atoms.len(), 2);
        assert_eq!(d.weight_at(1.0, 1e-6), 0.5);
        assert!((d.mean() - 0.5f64).abs() < 1e-12);
        assert_eq!(d.binned(&[-0.5, 0.5, 1.5]), vec![0.5, 0.5]);
        assert!(!d.has_negative());
    }

    #[test]
    fn record_round_trip() {
        let m = GaussianMixture::new(Scheme::TwoGaussian, vec![unit()], 0.5, Some(2.0));
        let json = serde_json::to_string(&m.to_record()).unwrap();
        let back: DistributionRecord = serde_json::from_str(&json).unwrap();
        assert_eq!(back.mixture().unwrap(), m);
        assert_eq!(to_csv(&[0.0], &[1.0]), "w,pdf\n0.000000000000e0,1.000000000000e0\n");
    }
}
