//! Instance-weight computation: novelty and quality metrics, the
//! population-scaled softmax with annealed temperature, and the mixing
//! variant.
//!
//! Weights are `w_i = m * exp(v_i / rho) / sum_j exp(v_j / rho)`, so they sum
//! to the population size `m` and reduce to all-ones as `rho` grows. `v` is
//! the instance novelty, the instance quality (its return), or their product,
//! optionally min-max normalized across the population first.

use crate::behavior::{self, BehaviorCharacterization};
use crate::env::EpisodeTrace;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Which per-instance signal drives the weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightMetric {
    /// All weights 1: the plain unweighted estimator.
    Uniform,
    /// Behavioral distance from the previous phase's optimum.
    Novelty,
    /// Episode return in the current environment.
    Quality,
    /// Product of novelty and quality.
    Mix,
}

/// Weighting hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightingConfig<T> {
    pub metric: WeightMetric,
    /// Initial softmax temperature.
    pub rho0: T,
    /// Per-generation temperature increment; weighting fades toward uniform.
    pub delta_rho: T,
    /// Min-max rescale metric values across the population before the softmax.
    ///
    /// On by default: raw novelty and return scales vary wildly across tasks,
    /// and the raw novelty-times-return product inverts its intended ordering
    /// when returns are negative.
    pub normalize_metrics: bool,
}

impl<T: Scalar> Default for WeightingConfig<T> {
    fn default() -> Self {
        Self {
            metric: WeightMetric::Uniform,
            rho0: T::one(),
            delta_rho: T::from_real(0.01),
            normalize_metrics: true,
        }
    }
}

impl<T: Scalar> WeightingConfig<T> {
    pub fn with_metric(metric: WeightMetric) -> Self {
        Self {
            metric,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rho0 > T::zero()) {
            return Err(Error::InvalidArgument("rho0 must be positive".into()));
        }
        if self.delta_rho < T::zero() {
            return Err(Error::InvalidArgument(
                "delta_rho must be nonnegative".into(),
            ));
        }
        Ok(())
    }
}

/// Per-population metric scalars, one entry per instance.
#[derive(Debug, Clone, PartialEq)]
pub struct PopulationMetrics<T> {
    pub novelty: Vec<T>,
    pub quality: Vec<T>,
}

impl<T: Scalar> PopulationMetrics<T> {
    pub fn new(novelty: Vec<T>, quality: Vec<T>) -> Result<Self> {
        if novelty.len() != quality.len() {
            return Err(Error::ShapeMismatch {
                context: "population metrics",
                expected: novelty.len(),
                actual: quality.len(),
            });
        }
        if novelty
            .iter()
            .chain(quality.iter())
            .any(|v| !v.is_finite())
        {
            return Err(Error::NonFinite("population metrics"));
        }
        Ok(Self { novelty, quality })
    }

    pub fn len(&self) -> usize {
        self.novelty.len()
    }

    pub fn is_empty(&self) -> bool {
        self.novelty.is_empty()
    }
}

/// Instance novelty: behavioral distance to the previous optimum.
pub fn novelty_of<T: Scalar>(
    bc: &BehaviorCharacterization<T>,
    bc_prev_opt: &BehaviorCharacterization<T>,
) -> Result<T> {
    behavior::distance(bc, bc_prev_opt)
}

/// Instance quality: the episode return.
pub fn quality_of<T: Scalar>(trace: &EpisodeTrace<T>) -> T {
    trace.episode_return
}

/// Population-scaled softmax with max-subtraction for overflow safety.
///
/// Returns `m` positive weights summing to `m` (up to rounding).
pub fn softmax_weights<T: Scalar>(values: &[T], rho: T) -> Result<Vec<T>> {
    if values.is_empty() {
        return Err(Error::InvalidArgument("empty value list".into()));
    }
    if !(rho > T::zero()) {
        return Err(Error::InvalidArgument("rho must be positive".into()));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("softmax values"));
    }
    let max = values.iter().fold(T::neg_infinity(), |m, &v| m.max(v));
    let exps: Vec<T> = values.iter().map(|&v| ((v - max) / rho).exp()).collect();
    let sum: T = exps.iter().copied().sum();
    let m = T::from_count(values.len());
    Ok(exps.into_iter().map(|e| m * e / sum).collect())
}

/// Min-max rescale to `[0, 1]`; a constant list maps to all zeros.
pub fn min_max_normalize<T: Scalar>(values: &[T]) -> Vec<T> {
    let min = values.iter().fold(T::infinity(), |m, &v| m.min(v));
    let max = values.iter().fold(T::neg_infinity(), |m, &v| m.max(v));
    if !(max > min) {
        return vec![T::zero(); values.len()];
    }
    let span = max - min;
    values.iter().map(|&v| (v - min) / span).collect()
}

/// Elementwise novelty-quality product, optionally on normalized metrics.
pub fn mix_values<T: Scalar>(metrics: &PopulationMetrics<T>, normalize: bool) -> Vec<T> {
    if normalize {
        let n = min_max_normalize(&metrics.novelty);
        let q = min_max_normalize(&metrics.quality);
        n.iter().zip(q.iter()).map(|(&a, &b)| a * b).collect()
    } else {
        metrics
            .novelty
            .iter()
            .zip(metrics.quality.iter())
            .map(|(&a, &b)| a * b)
            .collect()
    }
}

/// Compute the instance weights for one generation at temperature `rho`.
pub fn compute_weights<T: Scalar>(
    metrics: &PopulationMetrics<T>,
    config: &WeightingConfig<T>,
    rho: T,
) -> Result<Vec<T>> {
    if metrics.is_empty() {
        return Err(Error::InvalidArgument("empty population".into()));
    }
    let maybe_normalize = |values: &[T]| -> Vec<T> {
        if config.normalize_metrics {
            min_max_normalize(values)
        } else {
            values.to_vec()
        }
    };
    match config.metric {
        WeightMetric::Uniform => Ok(vec![T::one(); metrics.len()]),
        WeightMetric::Novelty => softmax_weights(&maybe_normalize(&metrics.novelty), rho),
        WeightMetric::Quality => softmax_weights(&maybe_normalize(&metrics.quality), rho),
        WeightMetric::Mix => {
            softmax_weights(&mix_values(metrics, config.normalize_metrics), rho)
        }
    }
}

/// Temperature annealing step.
pub fn anneal<T: Scalar>(rho: T, delta_rho: T) -> T {
    rho + delta_rho
}

/// Entropy of the weight distribution `w / m` (natural log); `ln m` when uniform.
pub fn weight_entropy<T: Scalar>(weights: &[T]) -> T {
    let m = T::from_count(weights.len());
    let mut h = T::zero();
    for &w in weights {
        let p = w / m;
        if p > T::zero() {
            h -= p * p.ln();
        }
    }
    h
}
