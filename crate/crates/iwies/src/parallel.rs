//! Deterministic parallel population evaluation.
//!
//! Workers share a master seed, so every party can regenerate any instance's
//! perturbation locally from `(generation, worker_index)`; only scalars cross
//! the worker boundary. A phase's novelty reference characterization is fixed,
//! so it needs to be shared once per phase, not per generation. Logical worker
//! `i` owns instance `i`; when fewer OS threads than instances are requested,
//! logical workers are multiplexed onto threads without changing any result:
//! the gather step orders packets by worker index and the update accumulates
//! in that fixed order, so the outcome is bit-identical for any thread count.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::behavior::BehaviorCharacterization;
use crate::error::{Error, Result};
use crate::objective::Objective;
use crate::policy::{perturb, ParameterVector};
use crate::scalar::Scalar;
use crate::weighting::novelty_of;

/// SplitMix64 finalizer; bijective on `u64`.
fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E3779B97F4A7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D049BB133111EB);
    x ^ (x >> 31)
}

/// Derive a decorrelated stream seed from a base seed and a stream index.
pub fn mix_seeds(base: u64, stream: u64) -> u64 {
    splitmix64(base ^ splitmix64(stream.wrapping_add(0xA5A5_A5A5_5A5A_5A5A)))
}

/// Counter-based seed derivation for perturbation streams.
///
/// `(generation, worker_index)` maps injectively into the ChaCha key (the
/// mixed lanes are bijective images of the raw values), so streams never
/// collide within a run and no state needs to be stored to reconstruct them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedSchedule {
    master_seed: u64,
}

impl SeedSchedule {
    pub fn new(master_seed: u64) -> Self {
        Self { master_seed }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    fn stream_key(&self, generation: u64, worker_index: u64) -> [u8; 32] {
        let lanes = [
            splitmix64(self.master_seed),
            splitmix64(generation),
            splitmix64(worker_index),
            splitmix64(self.master_seed ^ 0x7769_6573_2D65_7331), // schedule tag
        ];
        let mut key = [0u8; 32];
        for (chunk, lane) in key.chunks_exact_mut(8).zip(lanes) {
            chunk.copy_from_slice(&lane.to_le_bytes());
        }
        key
    }

    fn rng(&self, generation: usize, worker_index: usize) -> ChaCha8Rng {
        ChaCha8Rng::from_seed(self.stream_key(generation as u64, worker_index as u64))
    }
}

/// Regenerate the standard-normal perturbation for one instance.
///
/// Any holder of the schedule reproduces it bit-exactly; this is the only
/// source of randomness during population evaluation.
pub fn derive_perturbation<T: Scalar>(
    schedule: &SeedSchedule,
    generation: usize,
    worker_index: usize,
    d: usize,
) -> Vec<T> {
    let mut rng = schedule.rng(generation, worker_index);
    (0..d).map(|_| T::standard_normal(&mut rng)).collect()
}

/// The scalars one worker reports for its instance in one generation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarPacket<T> {
    pub worker_index: usize,
    pub fitness: T,
    pub novelty: T,
    pub quality: T,
}

impl<T: Scalar> ScalarPacket<T> {
    /// Debug-dump form: `gen=<g> worker=<i> f=<v> n=<v> q=<v>`.
    pub fn dump(&self, generation: usize) -> String {
        format!(
            "gen={} worker={} f={} n={} q={}",
            generation, self.worker_index, self.fitness, self.novelty, self.quality
        )
    }

    /// Parse the debug-dump form back into `(generation, packet)`.
    pub fn parse_dump(line: &str) -> Result<(usize, Self)> {
        let err = |message: String| Error::Parse { line: 1, message };
        let mut generation = None;
        let mut worker = None;
        let mut fitness = None;
        let mut novelty = None;
        let mut quality = None;
        for field in line.split_whitespace() {
            let (key, value) = field
                .split_once('=')
                .ok_or_else(|| err(format!("expected key=value, got `{field}`")))?;
            match key {
                "gen" => {
                    generation = Some(
                        value
                            .parse::<usize>()
                            .map_err(|_| err(format!("bad generation `{value}`")))?,
                    )
                }
                "worker" => {
                    worker = Some(
                        value
                            .parse::<usize>()
                            .map_err(|_| err(format!("bad worker index `{value}`")))?,
                    )
                }
                "f" | "n" | "q" => {
                    let parsed = value
                        .parse::<T>()
                        .map_err(|_| err(format!("bad scalar `{value}`")))?;
                    match key {
                        "f" => fitness = Some(parsed),
                        "n" => novelty = Some(parsed),
                        _ => quality = Some(parsed),
                    }
                }
                other => return Err(err(format!("unknown packet field `{other}`"))),
            }
        }
        Ok((
            generation.ok_or_else(|| err("missing gen".into()))?,
            ScalarPacket {
                worker_index: worker.ok_or_else(|| err("missing worker".into()))?,
                fitness: fitness.ok_or_else(|| err("missing f".into()))?,
                novelty: novelty.ok_or_else(|| err("missing n".into()))?,
                quality: quality.ok_or_else(|| err("missing q".into()))?,
            },
        ))
    }
}

impl<T: Scalar> fmt::Display for ScalarPacket<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "worker={} f={} n={} q={}",
            self.worker_index, self.fitness, self.novelty, self.quality
        )
    }
}

fn evaluate_instance<T: Scalar, O: Objective<T> + ?Sized>(
    theta: &ParameterVector<T>,
    sigma: T,
    generation: usize,
    index: usize,
    objective: &O,
    bc_prev: Option<&BehaviorCharacterization<T>>,
    schedule: &SeedSchedule,
) -> Result<ScalarPacket<T>> {
    let epsilon = derive_perturbation::<T>(schedule, generation, index, theta.len());
    let instance = perturb(theta, &epsilon, sigma)?;
    let eval = objective.evaluate(&instance)?;
    let novelty = match bc_prev {
        None => T::zero(),
        Some(prev) => {
            let bc = eval.behavior.as_ref().ok_or_else(|| {
                Error::Protocol(
                    "novelty reference supplied but the objective has no behavior \
                     characterization"
                        .into(),
                )
            })?;
            novelty_of(bc, prev)?
        }
    };
    Ok(ScalarPacket {
        worker_index: index,
        fitness: eval.fitness,
        novelty,
        quality: eval.fitness,
    })
}

/// Evaluate the `m` perturbed instances of one generation on `workers`
/// threads and gather one packet per instance, sorted by worker index.
///
/// Instance `i` is handled by thread `i % workers`; the result is independent
/// of the thread count.
pub fn evaluate_population<T: Scalar, O: Objective<T> + ?Sized>(
    theta: &ParameterVector<T>,
    sigma: T,
    generation: usize,
    m: usize,
    workers: usize,
    objective: &O,
    bc_prev: Option<&BehaviorCharacterization<T>>,
    schedule: &SeedSchedule,
) -> Result<Vec<ScalarPacket<T>>> {
    if m == 0 {
        return Err(Error::InvalidArgument("population size must be >= 1".into()));
    }
    if workers == 0 {
        return Err(Error::InvalidArgument("worker count must be >= 1".into()));
    }
    let threads = workers.min(m);
    if threads == 1 {
        return (0..m)
            .map(|i| evaluate_instance(theta, sigma, generation, i, objective, bc_prev, schedule))
            .collect();
    }

    let mut buckets: Vec<Result<Vec<ScalarPacket<T>>>> = Vec::with_capacity(threads);
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..threads)
            .map(|w| {
                scope.spawn(move || {
                    (w..m)
                        .step_by(threads)
                        .map(|i| {
                            evaluate_instance(
                                theta, sigma, generation, i, objective, bc_prev, schedule,
                            )
                        })
                        .collect::<Result<Vec<_>>>()
                })
            })
            .collect();
        for handle in handles {
            buckets.push(handle.join().expect("worker thread panicked"));
        }
    });

    let mut slots: Vec<Option<ScalarPacket<T>>> = vec![None; m];
    for bucket in buckets {
        for packet in bucket? {
            slots[packet.worker_index] = Some(packet);
        }
    }
    slots
        .into_iter()
        .enumerate()
        .map(|(i, slot)| slot.ok_or_else(|| Error::Protocol(format!("missing packet {i}"))))
        .collect()
}

/// Apply the weighted update `theta + alpha * (1/(m*sigma)) * sum_i w_i f_i eps_i`,
/// regenerating each perturbation from the schedule instead of storing the
/// `m x d` matrix across the scalar exchange.
///
/// Accumulation runs in worker-index order, so the result is bit-identical to
/// a reference that materializes the full perturbation matrix.
pub fn reconstruct_and_update<T: Scalar>(
    theta: &ParameterVector<T>,
    fitness: &[T],
    weights: &[T],
    sigma: T,
    alpha: T,
    generation: usize,
    schedule: &SeedSchedule,
) -> Result<ParameterVector<T>> {
    let m = fitness.len();
    if m == 0 {
        return Err(Error::InvalidArgument("population size must be >= 1".into()));
    }
    if weights.len() != m {
        return Err(Error::ShapeMismatch {
            context: "update weights",
            expected: m,
            actual: weights.len(),
        });
    }
    let d = theta.len();
    let mut acc = vec![T::zero(); d];
    for i in 0..m {
        let coeff = weights[i] * fitness[i];
        let epsilon = derive_perturbation::<T>(schedule, generation, i, d);
        for (a, e) in acc.iter_mut().zip(epsilon.iter()) {
            *a += coeff * *e;
        }
    }
    let scale = T::one() / (T::from_count(m) * sigma);
    let values = theta
        .as_slice()
        .iter()
        .zip(acc.iter())
        .map(|(&t, &a)| t + alpha * (scale * a))
        .collect();
    ParameterVector::new(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::QuadraticBowl;

    #[test]
    fn perturbations_are_reproducible_and_distinct() {
        let schedule = SeedSchedule::new(12345);
        let a: Vec<f64> = derive_perturbation(&schedule, 3, 7, 64);
        let b: Vec<f64> = derive_perturbation(&schedule, 3, 7, 64);
        assert_eq!(a, b);

        let c: Vec<f64> = derive_perturbation(&schedule, 3, 8, 64);
        assert!(a.iter().zip(c.iter()).any(|(x, y)| x != y));
        let d: Vec<f64> = derive_perturbation(&schedule, 4, 7, 64);
        assert!(a.iter().zip(d.iter()).any(|(x, y)| x != y));
    }

    #[test]
    fn perturbation_moments_match_standard_normal() {
        let schedule = SeedSchedule::new(99);
        let sample: Vec<f64> = derive_perturbation(&schedule, 0, 0, 100_000);
        let n = sample.len() as f64;
        let mean = sample.iter().sum::<f64>() / n;
        let var = sample.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
        assert!(mean.abs() < 0.02, "mean {mean}");
        assert!((var - 1.0).abs() < 0.05, "var {var}");
    }

    #[test]
    fn packet_dump_round_trips() {
        let p = ScalarPacket {
            worker_index: 5,
            fitness: -17.25,
            novelty: 0.1875,
            quality: -17.25,
        };
        let line = p.dump(42);
        assert_eq!(line, "gen=42 worker=5 f=-17.25 n=0.1875 q=-17.25");
        let (g, back) = ScalarPacket::<f64>::parse_dump(&line).unwrap();
        assert_eq!(g, 42);
        assert_eq!(back, p);

        // shortest round-trip decimals survive exactly
        let p = ScalarPacket {
            worker_index: 0,
            fitness: 0.1 + 0.2,
            novelty: 1.0 / 3.0,
            quality: f64::MIN_POSITIVE,
        };
        let (_, back) = ScalarPacket::<f64>::parse_dump(&p.dump(0)).unwrap();
        assert_eq!(back.fitness.to_bits(), p.fitness.to_bits());
        assert_eq!(back.novelty.to_bits(), p.novelty.to_bits());
        assert_eq!(back.quality.to_bits(), p.quality.to_bits());
    }

    #[test]
    fn packet_parse_rejects_malformed_lines() {
        assert!(ScalarPacket::<f64>::parse_dump("gen=1 worker=0 f=1").is_err());
        assert!(ScalarPacket::<f64>::parse_dump("gen=x worker=0 f=1 n=0 q=1").is_err());
        assert!(ScalarPacket::<f64>::parse_dump("nonsense").is_err());
    }

    #[test]
    fn worker_count_does_not_change_packets() {
        let bowl = QuadraticBowl::new(vec![0.5; 12]);
        let theta = ParameterVector::zeros(12);
        let schedule = SeedSchedule::new(7);
        let reference =
            evaluate_population(&theta, 0.05, 2, 16, 1, &bowl, None, &schedule).unwrap();
        for workers in [2, 3, 4, 8, 16, 32] {
            let got = evaluate_population(&theta, 0.05, 2, 16, workers, &bowl, None, &schedule)
                .unwrap();
            assert_eq!(got, reference, "workers={workers}");
        }
        assert!(reference
            .iter()
            .enumerate()
            .all(|(i, p)| p.worker_index == i));
    }

    #[test]
    fn zero_sigma_gives_unperturbed_fitness() {
        let bowl = QuadraticBowl::new(vec![1.0; 4]);
        let theta = ParameterVector::zeros(4);
        let schedule = SeedSchedule::new(1);
        let packets = evaluate_population(&theta, 0.0, 0, 8, 2, &bowl, None, &schedule).unwrap();
        assert!(packets.iter().all(|p| p.fitness == -4.0));
        assert!(packets.iter().all(|p| p.novelty == 0.0));
        assert!(packets.iter().all(|p| p.quality == p.fitness));
    }

    #[test]
    fn update_matches_materialized_reference_bitwise() {
        let schedule = SeedSchedule::new(404);
        let d = 33;
        let m = 16;
        let sigma = 0.05;
        let alpha = 0.02;
        let generation = 9;
        let theta =
            ParameterVector::new((0..d).map(|i| (i as f64) * 0.01 - 0.15).collect()).unwrap();
        let fitness: Vec<f64> = (0..m).map(|i| -((i * i) as f64) * 0.3 - 1.0).collect();
        let weights: Vec<f64> = (0..m).map(|i| 0.5 + 0.05 * i as f64).collect();

        let updated = reconstruct_and_update(
            &theta, &fitness, &weights, sigma, alpha, generation, &schedule,
        )
        .unwrap();

        // reference route: materialize the full matrix, then the identical
        // accumulation order
        let eps: Vec<Vec<f64>> = (0..m)
            .map(|i| derive_perturbation(&schedule, generation, i, d))
            .collect();
        let mut acc = vec![0.0; d];
        for i in 0..m {
            let c = weights[i] * fitness[i];
            for j in 0..d {
                acc[j] += c * eps[i][j];
            }
        }
        let scale = 1.0 / (m as f64 * sigma);
        for j in 0..d {
            let expect = theta.as_slice()[j] + alpha * (scale * acc[j]);
            assert_eq!(updated.as_slice()[j].to_bits(), expect.to_bits());
        }
    }

    #[test]
    fn zero_fitness_leaves_theta_unchanged() {
        let schedule = SeedSchedule::new(5);
        let theta = ParameterVector::new(vec![0.25; 10]).unwrap();
        let updated = reconstruct_and_update(
            &theta,
            &[0.0; 16],
            &[1.0; 16],
            0.05,
            0.05,
            0,
            &schedule,
        )
        .unwrap();
        assert_eq!(updated, theta);
    }

    #[test]
    fn weight_alpha_rescaling_identity() {
        let schedule = SeedSchedule::new(6);
        let theta = ParameterVector::new(vec![0.1; 8]).unwrap();
        let fitness = [-3.0, -1.0, -2.0, -4.0];
        let weights = [1.0, 1.5, 0.5, 1.0];
        let a = reconstruct_and_update(&theta, &fitness, &weights, 0.05, 0.04, 1, &schedule)
            .unwrap();
        // scaling all weights by c and alpha by 1/c is exact when c is a power of two
        let scaled: Vec<f64> = weights.iter().map(|w| w * 4.0).collect();
        let b = reconstruct_and_update(&theta, &fitness, &scaled, 0.05, 0.01, 1, &schedule)
            .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn update_validates_shapes() {
        let schedule = SeedSchedule::new(2);
        let theta = ParameterVector::zeros(4);
        assert!(reconstruct_and_update(&theta, &[1.0; 3], &[1.0; 2], 0.1, 0.1, 0, &schedule)
            .is_err());
        assert!(reconstruct_and_update(&theta, &[], &[], 0.1, 0.1, 0, &schedule).is_err());
    }

    #[test]
    fn mix_seeds_separates_streams() {
        let a = mix_seeds(1, 0);
        let b = mix_seeds(1, 1);
        let c = mix_seeds(2, 0);
        assert_ne!(a, b);
        assert_ne!(a, c);
        assert_eq!(a, mix_seeds(1, 0));
    }
}
