//! Sudden quench of a spin 1/2 from `(ε_i/2) σ_z` to `(ε_f/2) σ_x`.

use num_complex::Complex;
use qwork_core::error::{Error, Result};
use qwork_core::scalar::{lit, Real};
use qwork_core::{DensityMatrix, HermitianOperator, Protocol};

/// Basis in which the initial state matrix `[[p, q], [q*, 1-p]]` is written.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum LevelOrder {
    /// First basis vector is the ground state of `H_i`, so `p` is the
    /// ground-state probability.
    #[default]
    GroundFirst,
    /// Computational basis of `σ_z`, where the first vector is the excited
    /// state of `(ε_i/2) σ_z` for `ε_i > 0`.
    SigmaZ,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpinQuench {
    pub p: f64,
    pub q: Complex<f64>,
    pub eps_i: f64,
    pub eps_f: f64,
    pub order: LevelOrder,
}

impl SpinQuench {
    pub fn new(p: f64, q: Complex<f64>, eps_i: f64, eps_f: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Validation(format!("p must lie in [0, 1], got {p}")));
        }
        if q.norm_sqr() > p * (1.0 - p) + 1e-12 {
            return Err(Error::Validation(format!(
                "|q|^2 = {} exceeds p(1-p) = {}",
                q.norm_sqr(),
                p * (1.0 - p)
            )));
        }
        if !(eps_i > 0.0 && eps_f > 0.0) {
            return Err(Error::Validation("level splittings must be positive".into()));
        }
        Ok(Self {
            p,
            q,
            eps_i,
            eps_f,
            order: LevelOrder::GroundFirst,
        })
    }

    /// `p = 0.7`, `ε_i = 1`, `ε_f = 2` with the given real coherence.
    pub fn standard(q: f64) -> Self {
        Self::new(0.7, Complex::new(q, 0.0), 1.0, 2.0).expect("standard parameters are valid")
    }

    pub fn with_order(mut self, order: LevelOrder) -> Self {
        self.order = order;
        self
    }

    pub fn initial_hamiltonian<T: Real>(&self) -> HermitianOperator<T> {
        let h = lit::<T>(self.eps_i / 2.0);
        match self.order {
            LevelOrder::GroundFirst => HermitianOperator::diagonal(&[-h, h]),
            LevelOrder::SigmaZ => HermitianOperator::diagonal(&[h, -h]),
        }
    }

    pub fn final_hamiltonian<T: Real>(&self) -> HermitianOperator<T> {
        HermitianOperator::pauli_x().scaled(lit(self.eps_f / 2.0))
    }

    pub fn protocol<T: Real>(&self) -> Result<Protocol<T>> {
        Protocol::sudden(self.initial_hamiltonian(), self.final_hamiltonian())
    }

    pub fn state<T: Real>(&self) -> Result<DensityMatrix<T>> {
        let c = |re: f64, im: f64| Complex::new(lit::<T>(re), lit::<T>(im));
        let m = nalgebra::DMatrix::from_row_slice(
            2,
            2,
            &[c(self.p, 0.0), c(self.q.re, self.q.im), c(self.q.re, -self.q.im), c(1.0 - self.p, 0.0)],
        );
        DensityMatrix::new(m)
    }

    /// Projective work values `w_{m,n}` as `[w11, w21, w12, w22]` with level
    /// 1 the ground state.
    pub fn projective_work_values(&self) -> [f64; 4] {
        let (a, b) = (self.eps_i / 2.0, self.eps_f / 2.0);
        [-b + a, b + a, -b - a, b - a]
    }
}
