//! Alpha-skew-normal (ASN) distribution with seven parameter estimators.
//!
//! The numerical core is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix the usual double-precision instantiation.
//!
//! ```
//! use asn_core::{fit, Method, OrderedSample, Params};
//! use rand::SeedableRng;
//!
//! let truth = Params::new(0.0, 1.0, 2.0).unwrap();
//! let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
//! let sample = OrderedSample::new(truth.sample(300, &mut rng)).unwrap();
//! let result = fit(&sample, Method::Ade).unwrap();
//! assert!(result.converged);
//! ```

#![allow(clippy::needless_range_loop, clippy::excessive_precision, clippy::neg_cmp_op_on_partial_ord)]

pub mod distribution;
pub mod error;
pub mod estimators;
pub mod gof;
pub mod montecarlo;
pub mod normal;
pub mod optimize;
pub mod sample;
pub mod scalar;

pub use distribution::AsnParams;
pub use error::{Error, Result};
pub use estimators::{fit, fit_from, initialize, Evaluation, FitResult, Method};
pub use gof::{gof_report, ks_pvalue, ks_statistic, GofReport};
pub use montecarlo::{bias_mse, run_study, run_study_with, CellSummary, InitMode, SimConfig, SimulationReport};
pub use normal::StdNormal;
pub use optimize::{minimize, numeric_gradient, numeric_hessian, NelderMead, OptimResult};
pub use sample::{OrderedSample, TieRun};
pub use scalar::Scalar;

pub type Params = AsnParams<f64>;
pub type Params32 = AsnParams<f32>;
pub type Sample = OrderedSample<f64>;
pub type Sample32 = OrderedSample<f32>;
pub type Fit = FitResult<f64>;
pub type Fit32 = FitResult<f32>;
pub type Report = SimulationReport<f64>;
pub type Config = SimConfig<f64>;
