//! Quantum work statistics under projective, two-Gaussian and work-meter
//! energy measurements: outcome operations, post-measurement states, work
//! distributions and fluctuation relations.

// `!(x > 0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod amplitude;
pub mod channels;
pub mod distributions;
pub mod fluctuation;
pub mod mixture;
pub mod quadrature;
pub mod spin;

pub use amplitude::{amplitude_tensor, joint_probability, AmplitudeTensor, WorkInstance};
pub use channels::{
    gaussian_energy_nonselective, gaussian_energy_operation, kraus_energy_operation, pem_nonselective,
    pem_operation, two_gaussian_nonselective, two_gaussian_work_operation, work_meter_nonselective,
    work_meter_operation, GaussianScheme, GaussianWorkChannel, OutcomeOperator,
};
pub use distributions::{
    broad_gaussian_approx, characteristic_function, imprecise_limit_pdf, imprecise_q, mean_work, pem_work_pdf,
    resolution_check, resolution_check_for, tmh_quasi_pdf, two_gaussian_work_pdf, work_meter_pdf,
    CharacteristicFunction, ResolutionReport,
};
pub use fluctuation::{
    build_backward, crooks_check, modified_crooks_check, modified_jarzynski, FluctuationReport, JarzynskiResult,
    ProcessPair,
};
pub use mixture::{AtomDistribution, DistributionRecord, GaussianMixture, Grid, MixtureTerm, Scheme};
pub use qwork_core;
pub use spin::SpinQuench;

pub type Mixture64 = GaussianMixture<f64>;
pub type Atoms64 = AtomDistribution<f64>;
pub type WorkInstance64 = WorkInstance<f64>;
