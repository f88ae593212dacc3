//! Instance-weighted incremental evolution strategies for neural policy
//! search in changing environments.
//!
//! The optimizer perturbs a flat policy parameter vector with Gaussian noise,
//! evaluates the perturbed instances in parallel workers that exchange only
//! scalars, and moves the search point along a weighted fitness-times-noise
//! estimate. When the environment changes, the search continues from the
//! previous optimum; instance weights derived from behavioral novelty and/or
//! return quality steer the population toward behavior that fits the new
//! environment, and an annealed softmax temperature fades the weighting back
//! to uniform as adaptation proceeds.
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix the `f64` instantiation the shipped binaries use.

pub mod behavior;
pub mod checkpoint;
pub mod engine;
pub mod env;
pub mod error;
pub mod objective;
pub mod parallel;
pub mod policy;
pub mod scalar;
pub mod weighting;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Default scalar type of the shipped binaries and experiment configurations.
pub type Real = f64;
/// Parameter vector over [`Real`].
pub type Params = policy::ParameterVector<Real>;
/// Task specification over [`Real`].
pub type Task = env::TaskSpec<Real>;
/// Behavior characterization over [`Real`].
pub type Behavior = behavior::BehaviorCharacterization<Real>;
