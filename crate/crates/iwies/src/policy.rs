//! Feedforward MLP policy flattened into a single parameter vector.
//!
//! The policy maps an observation to a continuous action: linear layers with
//! ReLU between hidden layers, a linear output head, and per-coordinate
//! clipping to `[-action_clip, action_clip]`. All weights and biases live in
//! one flat vector so search-space perturbation and update are plain vector
//! arithmetic.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Layer sizes and action bound of the policy network.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpArchitecture<T> {
    pub input_dim: usize,
    pub hidden: Vec<usize>,
    pub output_dim: usize,
    /// Per-coordinate clip bound applied to the output layer.
    pub action_clip: T,
}

impl<T: Scalar> MlpArchitecture<T> {
    pub fn new(
        input_dim: usize,
        hidden: Vec<usize>,
        output_dim: usize,
        action_clip: T,
    ) -> Result<Self> {
        if input_dim == 0 || output_dim == 0 || hidden.iter().any(|&h| h == 0) {
            return Err(Error::InvalidArgument(
                "layer sizes must be positive".into(),
            ));
        }
        if !(action_clip > T::zero()) {
            return Err(Error::InvalidArgument("action_clip must be > 0".into()));
        }
        Ok(Self {
            input_dim,
            hidden,
            output_dim,
            action_clip,
        })
    }

    /// `(fan_in, fan_out)` for each consecutive layer pair.
    pub fn layer_dims(&self) -> Vec<(usize, usize)> {
        let mut sizes = Vec::with_capacity(self.hidden.len() + 2);
        sizes.push(self.input_dim);
        sizes.extend_from_slice(&self.hidden);
        sizes.push(self.output_dim);
        sizes.windows(2).map(|w| (w[0], w[1])).collect()
    }

    /// Total parameter count: sum of `(fan_in + 1) * fan_out` over layers.
    pub fn param_count(&self) -> usize {
        self.layer_dims()
            .iter()
            .map(|&(fan_in, fan_out)| (fan_in + 1) * fan_out)
            .sum()
    }
}

/// Flat vector of policy parameters; the search point of the optimizer.
///
/// Layout per layer: weight matrix row-major (`fan_out` rows of `fan_in`
/// entries), then the bias vector. Entries are always finite.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterVector<T>(Vec<T>);

impl<T: Scalar> ParameterVector<T> {
    pub fn new(values: Vec<T>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("parameter vector"));
        }
        Ok(Self(values))
    }

    pub fn zeros(len: usize) -> Self {
        Self(vec![T::zero(); len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<T> {
        self.0
    }
}

impl<T: Scalar> AsRef<[T]> for ParameterVector<T> {
    fn as_ref(&self) -> &[T] {
        &self.0
    }
}

/// Deterministic random initialization: per layer, weights uniform in
/// `[-sqrt(6/(fan_in+fan_out)), +sqrt(6/(fan_in+fan_out))]`, biases zero.
///
/// The fan-scaled bound keeps initial actions small, so an untrained policy
/// starts near-neutral instead of saturating the action clip.
pub fn init_random<T: Scalar>(arch: &MlpArchitecture<T>, seed: u64) -> ParameterVector<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = Vec::with_capacity(arch.param_count());
    for (fan_in, fan_out) in arch.layer_dims() {
        let bound = T::from_real(6.0 / (fan_in + fan_out) as f64).sqrt();
        let two = T::from_real(2.0);
        for _ in 0..fan_in * fan_out {
            let u = T::uniform_01(&mut rng);
            values.push((u * two - T::one()) * bound);
        }
        values.extend(std::iter::repeat(T::zero()).take(fan_out));
    }
    ParameterVector(values)
}

/// Evaluate the policy on one observation.
///
/// Pure function: identical inputs give bit-identical outputs. Every output
/// coordinate lies in `[-action_clip, action_clip]`.
pub fn forward<T: Scalar>(
    arch: &MlpArchitecture<T>,
    theta: &ParameterVector<T>,
    state: &[T],
) -> Result<Vec<T>> {
    if state.len() != arch.input_dim {
        return Err(Error::ShapeMismatch {
            context: "forward input",
            expected: arch.input_dim,
            actual: state.len(),
        });
    }
    let expected = arch.param_count();
    if theta.len() != expected {
        return Err(Error::ShapeMismatch {
            context: "forward parameters",
            expected,
            actual: theta.len(),
        });
    }

    let dims = arch.layer_dims();
    let last = dims.len() - 1;
    let params = theta.as_slice();
    let mut offset = 0;
    let mut activation = state.to_vec();
    for (index, &(fan_in, fan_out)) in dims.iter().enumerate() {
        let weights = &params[offset..offset + fan_in * fan_out];
        offset += fan_in * fan_out;
        let biases = &params[offset..offset + fan_out];
        offset += fan_out;

        let mut next = Vec::with_capacity(fan_out);
        for o in 0..fan_out {
            let row = &weights[o * fan_in..(o + 1) * fan_in];
            let mut z = biases[o];
            for (w, a) in row.iter().zip(activation.iter()) {
                z += *w * *a;
            }
            if index != last && z < T::zero() {
                z = T::zero(); // ReLU between hidden layers only
            }
            next.push(z);
        }
        activation = next;
    }

    let clip = arch.action_clip;
    for a in activation.iter_mut() {
        if *a > clip {
            *a = clip;
        } else if *a < -clip {
            *a = -clip;
        }
    }
    Ok(activation)
}

/// Elementwise `theta + sigma * epsilon`.
pub fn perturb<T: Scalar>(
    theta: &ParameterVector<T>,
    epsilon: &[T],
    sigma: T,
) -> Result<ParameterVector<T>> {
    if epsilon.len() != theta.len() {
        return Err(Error::ShapeMismatch {
            context: "perturbation",
            expected: theta.len(),
            actual: epsilon.len(),
        });
    }
    let values = theta
        .as_slice()
        .iter()
        .zip(epsilon.iter())
        .map(|(&t, &e)| t + sigma * e)
        .collect();
    ParameterVector::new(values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arch(input: usize, hidden: Vec<usize>, output: usize) -> MlpArchitecture<f64> {
        MlpArchitecture::new(input, hidden, output, 0.1).unwrap()
    }

    #[test]
    fn param_count_matches_fan_formula() {
        assert_eq!(arch(2, vec![128, 128], 2).param_count(), 17154);
        assert_eq!(arch(1, vec![], 1).param_count(), 2);
        assert_eq!(arch(2, vec![3], 2).param_count(), 17);
    }

    #[test]
    fn init_is_deterministic_per_seed() {
        let a = arch(2, vec![128, 128], 2);
        let t1 = init_random(&a, 99);
        let t2 = init_random(&a, 99);
        assert_eq!(t1, t2);
        assert_eq!(t1.len(), 17154);

        let t3 = init_random(&a, 100);
        assert!(t1.as_slice().iter().zip(t3.as_slice()).any(|(x, y)| x != y));
    }

    #[test]
    fn init_biases_are_zero_and_weights_bounded() {
        let a = arch(2, vec![3], 2);
        let theta = init_random(&a, 5);
        let v = theta.as_slice();
        // layout: 6 weights, 3 biases, 6 weights, 2 biases
        let w1_bound = (6.0f64 / 5.0).sqrt();
        let w2_bound = (6.0f64 / 5.0).sqrt();
        assert!(v[0..6].iter().all(|w| w.abs() <= w1_bound));
        assert!(v[6..9].iter().all(|&b| b == 0.0));
        assert!(v[9..15].iter().all(|w| w.abs() <= w2_bound));
        assert!(v[15..17].iter().all(|&b| b == 0.0));
    }

    #[test]
    fn zero_parameters_give_zero_action() {
        let a = arch(2, vec![128, 128], 2);
        let theta = ParameterVector::zeros(a.param_count());
        let out = forward(&a, &theta, &[0.3, -0.2]).unwrap();
        assert_eq!(out, vec![0.0, 0.0]);
    }

    #[test]
    fn output_saturates_at_clip() {
        let a = arch(1, vec![], 1);
        let theta = ParameterVector::new(vec![100.0, 0.0]).unwrap();
        let out = forward(&a, &theta, &[1.0]).unwrap();
        assert_eq!(out, vec![0.1]);
    }

    #[test]
    fn single_layer_hand_evaluation() {
        let a = arch(1, vec![], 1);
        let theta = ParameterVector::new(vec![0.5, 0.01]).unwrap();
        let out = forward(&a, &theta, &[0.1]).unwrap();
        assert!((out[0] - 0.06).abs() < 1e-15);
    }

    #[test]
    fn relu_applies_between_hidden_layers_only() {
        // 1 -> 1 hidden -> 1 output, weights chosen so the hidden pre-activation
        // is negative (ReLU zeroes it) while a negative output passes through.
        let a = arch(1, vec![1], 1);
        // layer 1: w = -1, b = 0; layer 2: w = 1, b = -0.05
        let theta = ParameterVector::new(vec![-1.0, 0.0, 1.0, -0.05]).unwrap();
        let out = forward(&a, &theta, &[1.0]).unwrap();
        assert_eq!(out, vec![-0.05]);
    }

    #[test]
    fn forward_rejects_wrong_shapes() {
        let a = arch(2, vec![3], 2);
        let theta = ParameterVector::zeros(a.param_count());
        assert!(matches!(
            forward(&a, &theta, &[1.0]),
            Err(Error::ShapeMismatch { .. })
        ));
        let short = ParameterVector::zeros(3);
        assert!(matches!(
            forward(&a, &short, &[1.0, 2.0]),
            Err(Error::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn perturb_arithmetic_and_inverse() {
        let theta = ParameterVector::new(vec![1.0, 1.0]).unwrap();
        let eps = [1.0, -1.0];
        let p = perturb(&theta, &eps, 0.05).unwrap();
        assert_eq!(p.as_slice(), &[1.05, 0.95]);

        // sigma = 0.5 and unit epsilons are exactly representable, so the
        // round trip is bit-exact
        let q = perturb(&theta, &eps, 0.5).unwrap();
        let back = perturb(&q, &eps, -0.5).unwrap();
        assert_eq!(back, theta);

        let zero = perturb(&theta, &[0.0, 0.0], 0.05).unwrap();
        assert_eq!(zero, theta);
    }

    #[test]
    fn perturb_rejects_length_mismatch() {
        let theta = ParameterVector::new(vec![1.0, 1.0]).unwrap();
        assert!(perturb(&theta, &[1.0], 0.1).is_err());
    }

    #[test]
    fn parameter_vector_rejects_non_finite() {
        assert!(ParameterVector::new(vec![1.0, f64::NAN]).is_err());
        assert!(ParameterVector::new(vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn forward_works_in_f32() {
        let a = MlpArchitecture::<f32>::new(1, vec![], 1, 0.1).unwrap();
        let theta = ParameterVector::new(vec![0.5f32, 0.01]).unwrap();
        let out = forward(&a, &theta, &[0.1]).unwrap();
        assert!((out[0] - 0.06).abs() < 1e-6);
    }
}
