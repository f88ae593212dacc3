//! The evaluation boundary between the optimizer and what it optimizes.
//!
//! An [`Objective`] turns a parameter vector into a fitness scalar and, when
//! the domain has one, a behavior characterization. The navigation
//! implementation rolls out the MLP policy in a task; the quadratic bowl is a
//! synthetic benchmark used to validate the gradient estimator.

use crate::behavior::{bc_nav, BehaviorCharacterization};
use crate::env::{rollout, TaskSpec};
use crate::error::Result;
use crate::policy::{init_random, MlpArchitecture, ParameterVector};
use crate::scalar::Scalar;

/// Fitness and optional behavior characterization of one instance.
#[derive(Debug, Clone)]
pub struct Evaluation<T> {
    pub fitness: T,
    pub behavior: Option<BehaviorCharacterization<T>>,
}

/// A black-box fitness function over flat parameter vectors.
pub trait Objective<T: Scalar>: Sync {
    /// Dimension of the search space.
    fn dim(&self) -> usize;

    /// Evaluate one instance. Must be deterministic.
    fn evaluate(&self, params: &ParameterVector<T>) -> Result<Evaluation<T>>;

    /// Deterministic starting point for from-scratch optimization.
    fn initial_params(&self, seed: u64) -> ParameterVector<T>;
}

/// Policy search in one stationary navigation task: fitness is the episode
/// return, the behavior characterization is the position trace.
pub struct NavigationObjective<'a, T> {
    arch: &'a MlpArchitecture<T>,
    task: &'a TaskSpec<T>,
}

impl<'a, T: Scalar> NavigationObjective<'a, T> {
    pub fn new(arch: &'a MlpArchitecture<T>, task: &'a TaskSpec<T>) -> Self {
        Self { arch, task }
    }

    pub fn task(&self) -> &TaskSpec<T> {
        self.task
    }

    pub fn arch(&self) -> &MlpArchitecture<T> {
        self.arch
    }
}

impl<T: Scalar> Objective<T> for NavigationObjective<'_, T> {
    fn dim(&self) -> usize {
        self.arch.param_count()
    }

    fn evaluate(&self, params: &ParameterVector<T>) -> Result<Evaluation<T>> {
        let trace = rollout(self.task, self.arch, params)?;
        let behavior = bc_nav(&trace, self.task.horizon)?;
        Ok(Evaluation {
            fitness: trace.episode_return,
            behavior: Some(behavior),
        })
    }

    fn initial_params(&self, seed: u64) -> ParameterVector<T> {
        init_random(self.arch, seed)
    }
}

/// Synthetic benchmark: `f(z) = -||z - target||^2`, maximized at `target`.
pub struct QuadraticBowl<T> {
    target: Vec<T>,
}

impl<T: Scalar> QuadraticBowl<T> {
    pub fn new(target: Vec<T>) -> Self {
        Self { target }
    }

    pub fn target(&self) -> &[T] {
        &self.target
    }
}

impl<T: Scalar> Objective<T> for QuadraticBowl<T> {
    fn dim(&self) -> usize {
        self.target.len()
    }

    fn evaluate(&self, params: &ParameterVector<T>) -> Result<Evaluation<T>> {
        let fitness = -params
            .as_slice()
            .iter()
            .zip(self.target.iter())
            .map(|(&z, &t)| (z - t) * (z - t))
            .sum::<T>();
        Ok(Evaluation {
            fitness,
            behavior: None,
        })
    }

    fn initial_params(&self, _seed: u64) -> ParameterVector<T> {
        ParameterVector::zeros(self.target.len())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_bowl_peaks_at_target() {
        let bowl = QuadraticBowl::new(vec![1.0, -2.0]);
        let at_target = bowl
            .evaluate(&ParameterVector::new(vec![1.0, -2.0]).unwrap())
            .unwrap();
        assert_eq!(at_target.fitness, 0.0);
        let off = bowl
            .evaluate(&ParameterVector::new(vec![0.0, 0.0]).unwrap())
            .unwrap();
        assert_eq!(off.fitness, -5.0);
        assert!(off.behavior.is_none());
    }
}
