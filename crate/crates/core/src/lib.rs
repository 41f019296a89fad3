//! Minimax shrinkage estimation of a multivariate normal mean with a known,
//! possibly heteroscedastic, variance matrix.
//!
//! The crate is `no_std` (it needs `alloc`). It provides:
//!
//! * [`model`]: problem, prior, direction and estimator descriptions.
//! * [`canonical`]: reduction of a general `(Sigma, Q)` problem to diagonal
//!   form and the general minimaxity constant `c*(Sigma, Q, A)`.
//! * [`direction`]: the exact, non-iterative optimal shrinkage direction.
//! * [`estimators`]: every estimator as a pure map from data to estimate.
//! * [`bounds`]: closed-form risk bounds.
//! * [`risk`]: a seeded, chunked Monte Carlo engine for pointwise and Bayes
//!   risk whose results do not depend on how chunks are scheduled.
//! * [`special`]: chi-squared quantiles via the regularized incomplete gamma.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod bounds;
pub mod canonical;
pub mod direction;
mod error;
pub mod estimators;
pub mod linalg;
pub mod model;
pub mod risk;
pub mod special;

pub use error::{Error, Result};
pub use model::{
    Direction, EffectiveGamma, EstimatorKind, EstimatorSpec, FactorVersion, PriorSpec, ProblemSpec,
};
