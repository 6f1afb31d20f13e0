//! Variance-based global sensitivity analysis for models with correlated
//! inputs, plus the whole-body midazolam PBPK case model used to exercise it.
//!
//! The estimators all operate on standard-normal coordinates (uniform and
//! lognormal marginals are reached through transforms inside the models) and
//! come in four flavors:
//!
//! * [`sobol::run_independent`] — classical Sobol indices, correlations ignored;
//! * [`sobol::estimate_grouped_pair`] — the correlated pair sampled jointly and
//!   pick-frozen as one group;
//! * [`kucherenko::estimate_kucherenko`] — dependent-input indices via Gaussian
//!   conditional sampling;
//! * the latent route — [`latent::decompose`] a correlated pair into a latent
//!   variable plus two unique variances, then run classical Sobol on the
//!   independent lifted factor set.
//!
//! Everything numeric is generic over [`scalar::Scalar`] (`f32` or `f64`);
//! the `*64` aliases below fix the common double-precision case.

pub mod algebraic;
pub mod error;
pub mod kucherenko;
pub mod latent;
pub mod linalg;
pub mod model;
pub mod ode;
pub mod pbpk;
pub mod sampling;
pub mod sobol;

mod scalar;

pub use error::{Error, OdeError, Result};
pub use model::GsaModel;
pub use sampling::RandomStream;
pub use scalar::Scalar;

/// Double-precision aliases for the main public types.
pub type Marginal64 = sampling::Marginal<f64>;
pub type LatentDecomposition64 = latent::LatentDecomposition<f64>;
pub type SamplePlan64 = sobol::SamplePlan<f64>;
pub type SensitivityReport64 = sobol::SensitivityReport<f64>;
pub type GaussianJoint64 = kucherenko::GaussianJoint<f64>;
pub type Trajectory64 = ode::Trajectory<f64>;
pub type Individual64 = pbpk::Individual<f64>;
pub type PbpkSystem64 = pbpk::PbpkSystem<f64>;
