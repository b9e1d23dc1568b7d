//! Level-resolved transition amplitudes `Π_m(τ) U Π_n(0)` and the tensor
//! `p(m,n,n') = Tr Π_m(τ) U Π_n(0) ρ Π_{n'}(0) U†` from which every work
//! distribution is assembled.

use nalgebra::DMatrix;
use num_complex::Complex;
use qwork_core::error::{Error, Result};
use qwork_core::matrix::trace_product;
use qwork_core::scalar::{lit, tol, CMatrix, Real};
use qwork_core::{DensityMatrix, Protocol, SpectralDecomposition};

/// Cached spectral data and blocks `K_{mn} = Π_m(τ) U Π_n(0)` for one
/// protocol and initial state.
#[derive(Clone, Debug)]
pub struct WorkInstance<T: Real> {
    d0: SpectralDecomposition<T>,
    dt: SpectralDecomposition<T>,
    propagator: CMatrix<T>,
    rho: DensityMatrix<T>,
    blocks: Vec<CMatrix<T>>,
}

impl<T: Real> WorkInstance<T> {
    pub fn new(p: &Protocol<T>, rho: &DensityMatrix<T>) -> Result<Self> {
        let (d0, dt) = p.decompose()?;
        Self::from_parts(d0, dt, p.propagator().clone(), rho.clone())
    }

    pub fn from_parts(
        d0: SpectralDecomposition<T>,
        dt: SpectralDecomposition<T>,
        propagator: CMatrix<T>,
        rho: DensityMatrix<T>,
    ) -> Result<Self> {
        let n = d0.dim();
        for found in [dt.dim(), propagator.nrows(), propagator.ncols(), rho.dim()] {
            if found != n {
                return Err(Error::DimensionMismatch { expected: n, found });
            }
        }
        let mut blocks = Vec::with_capacity(dt.levels() * d0.levels());
        for pm in dt.projectors() {
            let left = pm * &propagator;
            for pn in d0.projectors() {
                blocks.push(&left * pn);
            }
        }
        Ok(Self {
            d0,
            dt,
            propagator,
            rho,
            blocks,
        })
    }

    pub fn dim(&self) -> usize {
        self.d0.dim()
    }

    pub fn initial(&self) -> &SpectralDecomposition<T> {
        &self.d0
    }

    pub fn final_spectrum(&self) -> &SpectralDecomposition<T> {
        &self.dt
    }

    pub fn propagator(&self) -> &CMatrix<T> {
        &self.propagator
    }

    pub fn state(&self) -> &DensityMatrix<T> {
        &self.rho
    }

    pub fn initial_levels(&self) -> usize {
        self.d0.levels()
    }

    pub fn final_levels(&self) -> usize {
        self.dt.levels()
    }

    /// `Π_m(τ) U Π_n(0)`.
    pub fn block(&self, m: usize, n: usize) -> &CMatrix<T> {
        &self.blocks[m * self.d0.levels() + n]
    }

    /// Projective work value `w_{m,n} = e_m(τ) - e_n(0)`.
    pub fn work_value(&self, m: usize, n: usize) -> T {
        self.dt.eigenvalue(m) - self.d0.eigenvalue(n)
    }

    /// Scale against which work values are compared for equality.
    pub fn spectral_scale(&self) -> T {
        let e0 = self.d0.eigenvalues();
        let et = self.dt.eigenvalues();
        let magnitude = e0.iter().chain(et).fold(T::zero(), |a, e| a.max(e.abs()));
        (self.d0.spectral_range() + self.dt.spectral_range()).max(magnitude * T::default_epsilon().sqrt())
    }

    /// `K_{mn} ρ K_{m'n'}†`.
    pub fn term(&self, m: usize, n: usize, mp: usize, np: usize) -> CMatrix<T> {
        self.block(m, n) * self.rho.matrix() * self.block(mp, np).adjoint()
    }

    /// `p(m,n,n')`.
    pub fn amplitude(&self, m: usize, n: usize, np: usize) -> Complex<T> {
        trace_product(&(self.block(m, n) * self.rho.matrix()), &self.block(m, np).adjoint())
    }

    pub fn amplitude_tensor(&self) -> AmplitudeTensor<T> {
        let (lt, l0) = (self.final_levels(), self.initial_levels());
        let mut values = Vec::with_capacity(lt * l0 * l0);
        for m in 0..lt {
            let rows: Vec<CMatrix<T>> = (0..l0).map(|n| self.block(m, n) * self.rho.matrix()).collect();
            let cols: Vec<CMatrix<T>> = (0..l0).map(|n| self.block(m, n).adjoint()).collect();
            for (n, r) in rows.iter().enumerate() {
                for (np, c) in cols.iter().enumerate() {
                    let t = trace_product(r, c);
                    values.push(if n == np { Complex::new(t.re, T::zero()) } else { t });
                }
            }
        }
        // enforce the exact conjugation symmetry in (n, n')
        for m in 0..lt {
            for n in 0..l0 {
                for np in (n + 1)..l0 {
                    let a = values[(m * l0 + n) * l0 + np];
                    let b = values[(m * l0 + np) * l0 + n];
                    let half: T = lit(0.5);
                    let sym = (a + b.conj()) * half;
                    values[(m * l0 + n) * l0 + np] = sym;
                    values[(m * l0 + np) * l0 + n] = sym.conj();
                }
            }
        }
        AmplitudeTensor {
            final_levels: lt,
            initial_levels: l0,
            values,
        }
    }

    /// `p_Λ(m,n) = Tr Π_m U Π_n ρ Π_n U†`, rows indexed by final level `m`.
    pub fn joint_probability(&self) -> DMatrix<T> {
        let t = self.amplitude_tensor();
        DMatrix::from_fn(self.final_levels(), self.initial_levels(), |m, n| t.get(m, n, n).re)
    }
}

/// `p(m, n, n')` over final levels `m` and initial levels `n, n'`.
#[derive(Clone, Debug, PartialEq)]
pub struct AmplitudeTensor<T: Real> {
    final_levels: usize,
    initial_levels: usize,
    values: Vec<Complex<T>>,
}

impl<T: Real> AmplitudeTensor<T> {
    pub fn final_levels(&self) -> usize {
        self.final_levels
    }

    pub fn initial_levels(&self) -> usize {
        self.initial_levels
    }

    pub fn get(&self, m: usize, n: usize, np: usize) -> Complex<T> {
        self.values[(m * self.initial_levels + n) * self.initial_levels + np]
    }

    /// `(m, n, n', value)` for every entry.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, usize, Complex<T>)> + '_ {
        let l0 = self.initial_levels;
        self.values
            .iter()
            .enumerate()
            .map(move |(k, &v)| (k / (l0 * l0), (k / l0) % l0, k % l0, v))
    }

    /// Largest violation of `p(m,n,n') = conj p(m,n',n)`.
    pub fn conjugation_defect(&self) -> T {
        self.iter()
            .map(|(m, n, np, v)| {
                let d = v - self.get(m, np, n).conj();
                d.norm_sqr().sqrt()
            })
            .fold(T::zero(), |a, b| a.max(b))
    }

    /// `Σ_m p(m,n,n)`: initial populations.
    pub fn initial_populations(&self) -> Vec<T> {
        (0..self.initial_levels)
            .map(|n| (0..self.final_levels).fold(T::zero(), |a, m| a + self.get(m, n, n).re))
            .collect()
    }

    /// Checks the documented invariants to the given tolerances.
    pub fn validate(&self) -> Result<()> {
        let defect = self.conjugation_defect();
        if defect > tol::<T>(1e-12) {
            return Err(Error::Numeric(format!("amplitude tensor not conjugation symmetric ({defect})")));
        }
        let pops = self.initial_populations();
        if let Some(p) = pops.iter().find(|&&p| p < -tol::<T>(1e-10)) {
            return Err(Error::Numeric(format!("negative initial population {p}")));
        }
        let total = pops.iter().fold(T::zero(), |a, &b| a + b);
        if (total - T::one()).abs() > tol::<T>(1e-10) {
            return Err(Error::Numeric(format!("amplitude tensor diagonal sums to {total}")));
        }
        Ok(())
    }
}

/// Joint probabilities of two projective energy measurements.
pub fn joint_probability<T: Real>(p: &Protocol<T>, rho: &DensityMatrix<T>) -> Result<DMatrix<T>> {
    Ok(WorkInstance::new(p, rho)?.joint_probability())
}

pub fn amplitude_tensor<T: Real>(p: &Protocol<T>, rho: &DensityMatrix<T>) -> Result<AmplitudeTensor<T>> {
    Ok(WorkInstance::new(p, rho)?.amplitude_tensor())
}
