//! The search loop: population sampling, weighted gradient estimation,
//! parameter updates, and the multi-phase driver over a changing environment.
//!
//! Phase one of a run always optimizes from scratch with uniform weights.
//! Later phases either restart from scratch (`Fs`) or continue from the
//! previous phase's optimum, with instance weights drawn from novelty,
//! quality, or their mix; `Ca` is the continue-from-optimum baseline with
//! uniform weights. The whole parameter trajectory is a pure function of
//! `(config, tasks, method)`.

use std::time::Instant;

use crate::behavior::BehaviorCharacterization;
use crate::env::TaskSpec;
use crate::error::{Error, Result};
use crate::objective::{NavigationObjective, Objective};
use crate::parallel::{evaluate_population, mix_seeds, reconstruct_and_update, SeedSchedule};
use crate::policy::{MlpArchitecture, ParameterVector};
use crate::scalar::Scalar;
use crate::weighting::{
    anneal, compute_weights, weight_entropy, PopulationMetrics, WeightMetric, WeightingConfig,
};

/// Transform applied to population fitness before the gradient estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FitnessShaping {
    /// Use raw returns.
    Raw,
    /// Replace returns by centered ranks in `[-0.5, 0.5]`.
    ///
    /// This is the default: with raw all-negative returns every population
    /// term repels the search point, which both swamps the update in noise
    /// proportional to the return magnitude and inverts the effect of
    /// instance weights (an upweighted instance would push the search
    /// *away* from itself harder). Centering fixes the sign so weights
    /// amplify the influence of the instances they mark.
    #[default]
    CenteredRank,
}

/// Hyperparameters of one optimization phase.
#[derive(Debug, Clone, PartialEq)]
pub struct EsConfig<T> {
    /// Population size `m`.
    pub population: usize,
    /// Noise standard deviation.
    pub sigma: T,
    /// Learning rate.
    pub alpha: T,
    /// Generations per phase.
    pub generations: usize,
    pub weighting: WeightingConfig<T>,
    pub fitness_shaping: FitnessShaping,
    pub master_seed: u64,
}

impl<T: Scalar> EsConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if self.population == 0 {
            return Err(Error::InvalidArgument(
                "population size must be >= 1".into(),
            ));
        }
        if !(self.sigma > T::zero()) {
            return Err(Error::InvalidArgument("sigma must be positive".into()));
        }
        if !(self.alpha > T::zero()) {
            return Err(Error::InvalidArgument("alpha must be positive".into()));
        }
        self.weighting.validate()
    }
}

impl<T: Scalar> Default for EsConfig<T> {
    /// Population and noise scale follow the navigation experiment protocol;
    /// the learning rate and temperature schedule are this crate's defaults.
    fn default() -> Self {
        Self {
            population: 16,
            sigma: T::from_real(0.05),
            alpha: T::from_real(0.05),
            generations: 200,
            weighting: WeightingConfig::default(),
            fitness_shaping: FitnessShaping::default(),
            master_seed: 0,
        }
    }
}

/// Per-generation record emitted to the experiment harness.
#[derive(Debug, Clone, PartialEq)]
pub struct GenerationReport<T> {
    pub generation: usize,
    /// Return of the unperturbed search point at the start of the generation.
    pub unperturbed_return: T,
    /// Mean raw population fitness.
    pub mean_fitness: T,
    /// Temperature used for this generation's weights.
    pub rho: T,
    pub weight_min: T,
    pub weight_max: T,
    pub weight_entropy: T,
    /// Wall-clock duration of the generation; excluded from reproducible logs.
    pub wall_ms: f64,
}

/// Outcome of one optimization phase.
#[derive(Debug, Clone)]
pub struct PhaseResult<T> {
    pub theta_star: ParameterVector<T>,
    /// Behavior characterization of the final optimum, when the domain has one.
    pub bc_star: Option<BehaviorCharacterization<T>>,
    pub reports: Vec<GenerationReport<T>>,
    /// Mean unperturbed return over all generations of the phase.
    pub average_return: T,
}

/// Adaptation rule used when the environment changes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Re-initialize randomly every phase.
    Fs,
    /// Continue from the previous optimum, uniform weights.
    Ca,
    /// Continue, weighting instances by novelty.
    IwiesN,
    /// Continue, weighting instances by quality.
    IwiesQu,
    /// Continue, weighting instances by the novelty-quality mix.
    IwiesMix,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Fs,
        Method::Ca,
        Method::IwiesN,
        Method::IwiesQu,
        Method::IwiesMix,
    ];

    pub fn metric(self) -> WeightMetric {
        match self {
            Method::Fs | Method::Ca => WeightMetric::Uniform,
            Method::IwiesN => WeightMetric::Novelty,
            Method::IwiesQu => WeightMetric::Quality,
            Method::IwiesMix => WeightMetric::Mix,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            Method::Fs => "fs",
            Method::Ca => "ca",
            Method::IwiesN => "iwies-n",
            Method::IwiesQu => "iwies-qu",
            Method::IwiesMix => "iwies-mix",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fs" => Ok(Method::Fs),
            "ca" => Ok(Method::Ca),
            "iwies-n" => Ok(Method::IwiesN),
            "iwies-qu" => Ok(Method::IwiesQu),
            "iwies-mix" => Ok(Method::IwiesMix),
            other => Err(Error::InvalidArgument(format!("unknown method `{other}`"))),
        }
    }
}

/// Centered ranks in `[-0.5, 0.5]`; ties broken by index for determinism.
pub fn centered_ranks<T: Scalar>(values: &[T]) -> Vec<T> {
    let m = values.len();
    if m <= 1 {
        return vec![T::zero(); m];
    }
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| {
        values[a]
            .partial_cmp(&values[b])
            .expect("finite fitness")
            .then(a.cmp(&b))
    });
    let half = T::from_real(0.5);
    let denom = T::from_count(m - 1);
    let mut shaped = vec![T::zero(); m];
    for (rank, &index) in order.iter().enumerate() {
        shaped[index] = T::from_count(rank) / denom - half;
    }
    shaped
}

/// Weighted search-gradient estimate `(1/(m*sigma)) * sum_i w_i f_i eps_i`
/// from an explicit perturbation matrix, accumulated in index order.
pub fn estimate_gradient<T: Scalar>(
    fitness: &[T],
    weights: &[T],
    epsilons: &[Vec<T>],
    sigma: T,
) -> Result<Vec<T>> {
    let m = fitness.len();
    if m == 0 {
        return Err(Error::InvalidArgument("population size must be >= 1".into()));
    }
    if weights.len() != m || epsilons.len() != m {
        return Err(Error::ShapeMismatch {
            context: "gradient estimate",
            expected: m,
            actual: weights.len().min(epsilons.len()),
        });
    }
    let d = epsilons[0].len();
    let mut acc = vec![T::zero(); d];
    for i in 0..m {
        if epsilons[i].len() != d {
            return Err(Error::ShapeMismatch {
                context: "perturbation row",
                expected: d,
                actual: epsilons[i].len(),
            });
        }
        let coeff = weights[i] * fitness[i];
        for (a, e) in acc.iter_mut().zip(epsilons[i].iter()) {
            *a += coeff * *e;
        }
    }
    let scale = T::one() / (T::from_count(m) * sigma);
    Ok(acc.into_iter().map(|a| scale * a).collect())
}

/// One generation: evaluate the population, exchange scalars, weight, update.
///
/// The report's `unperturbed_return` is the return of `theta` as passed in
/// (before the update), so generation 0 of a phase reports the return of the
/// phase's starting point.
#[allow(clippy::too_many_arguments)]
pub fn es_step<T: Scalar, O: Objective<T> + ?Sized>(
    theta: &ParameterVector<T>,
    objective: &O,
    config: &EsConfig<T>,
    metric: WeightMetric,
    generation: usize,
    rho: T,
    bc_prev: Option<&BehaviorCharacterization<T>>,
    workers: usize,
    schedule: &SeedSchedule,
) -> Result<(ParameterVector<T>, GenerationReport<T>)> {
    let start = Instant::now();
    let m = config.population;

    let base = objective.evaluate(theta)?;
    let packets = evaluate_population(
        theta,
        config.sigma,
        generation,
        m,
        workers,
        objective,
        bc_prev,
        schedule,
    )?;
    for (i, p) in packets.iter().enumerate() {
        if p.worker_index != i {
            return Err(Error::Protocol(format!(
                "packet {i} reports worker {}",
                p.worker_index
            )));
        }
    }

    let fitness: Vec<T> = packets.iter().map(|p| p.fitness).collect();
    let metrics = PopulationMetrics::new(
        packets.iter().map(|p| p.novelty).collect(),
        packets.iter().map(|p| p.quality).collect(),
    )?;
    let weighting = WeightingConfig {
        metric,
        ..config.weighting
    };
    let weights = compute_weights(&metrics, &weighting, rho)?;

    let shaped = match config.fitness_shaping {
        FitnessShaping::Raw => fitness.clone(),
        FitnessShaping::CenteredRank => centered_ranks(&fitness),
    };
    let updated = reconstruct_and_update(
        theta,
        &shaped,
        &weights,
        config.sigma,
        config.alpha,
        generation,
        schedule,
    )?;

    let mean_fitness = fitness.iter().copied().sum::<T>() / T::from_count(m);
    let report = GenerationReport {
        generation,
        unperturbed_return: base.fitness,
        mean_fitness,
        rho,
        weight_min: weights.iter().fold(T::infinity(), |a, &w| a.min(w)),
        weight_max: weights.iter().fold(T::neg_infinity(), |a, &w| a.max(w)),
        weight_entropy: weight_entropy(&weights),
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
    };
    Ok((updated, report))
}

fn run_phase<T: Scalar, O: Objective<T> + ?Sized>(
    objective: &O,
    config: &EsConfig<T>,
    metric: WeightMetric,
    theta0: ParameterVector<T>,
    bc_prev: Option<&BehaviorCharacterization<T>>,
    workers: usize,
) -> Result<PhaseResult<T>> {
    config.validate()?;
    let schedule = SeedSchedule::new(config.master_seed);
    let mut theta = theta0;
    let mut rho = config.weighting.rho0;
    let mut reports = Vec::with_capacity(config.generations);
    for generation in 0..config.generations {
        let (next, report) = es_step(
            &theta, objective, config, metric, generation, rho, bc_prev, workers, &schedule,
        )?;
        theta = next;
        reports.push(report);
        rho = anneal(rho, config.weighting.delta_rho);
    }
    let average_return = if reports.is_empty() {
        T::nan()
    } else {
        reports.iter().map(|r| r.unperturbed_return).sum::<T>() / T::from_count(reports.len())
    };
    let final_eval = objective.evaluate(&theta)?;
    Ok(PhaseResult {
        theta_star: theta,
        bc_star: final_eval.behavior,
        reports,
        average_return,
    })
}

/// Seed stream tag for the random initialization of a from-scratch phase.
const INIT_STREAM: u64 = 0xF00D;

/// Optimize from a random initialization with uniform weights (the phase-one
/// branch, and the `Fs` baseline in later phases).
pub fn train_from_scratch<T: Scalar, O: Objective<T> + ?Sized>(
    objective: &O,
    config: &EsConfig<T>,
    workers: usize,
) -> Result<PhaseResult<T>> {
    let theta0 = objective.initial_params(mix_seeds(config.master_seed, INIT_STREAM));
    run_phase(
        objective,
        config,
        WeightMetric::Uniform,
        theta0,
        None,
        workers,
    )
}

/// Adapt the previous phase's optimum to a new environment with the
/// configured weighting metric, annealing the temperature each generation.
///
/// With `WeightMetric::Uniform` this is exactly the continue-and-adapt
/// baseline. `bc_prev` is required when the metric uses novelty.
pub fn adapt<T: Scalar, O: Objective<T> + ?Sized>(
    theta_prev: &ParameterVector<T>,
    bc_prev: Option<&BehaviorCharacterization<T>>,
    objective: &O,
    config: &EsConfig<T>,
    workers: usize,
) -> Result<PhaseResult<T>> {
    if theta_prev.len() != objective.dim() {
        return Err(Error::ShapeMismatch {
            context: "adapt initial parameters",
            expected: objective.dim(),
            actual: theta_prev.len(),
        });
    }
    let needs_novelty = matches!(
        config.weighting.metric,
        WeightMetric::Novelty | WeightMetric::Mix
    );
    if needs_novelty && bc_prev.is_none() {
        return Err(Error::InvalidArgument(
            "novelty-based weighting requires the previous optimum's behavior \
             characterization"
                .into(),
        ));
    }
    run_phase(
        objective,
        config,
        config.weighting.metric,
        theta_prev.clone(),
        bc_prev,
        workers,
    )
}

/// Per-phase seed derivation shared by every multi-phase driver, so paired
/// comparisons across methods see identical perturbation streams.
pub fn phase_seed(master_seed: u64, phase: usize) -> u64 {
    mix_seeds(master_seed, phase as u64)
}

/// Drive one method through a task sequence: phase one from scratch, then
/// per-phase re-training (`Fs`) or weighted adaptation (everything else).
pub fn run_incremental<T: Scalar>(
    arch: &MlpArchitecture<T>,
    tasks: &[TaskSpec<T>],
    config: &EsConfig<T>,
    method: Method,
    workers: usize,
) -> Result<Vec<PhaseResult<T>>> {
    if tasks.is_empty() {
        return Err(Error::InvalidArgument("at least one task required".into()));
    }
    let mut results: Vec<PhaseResult<T>> = Vec::with_capacity(tasks.len());
    for (phase, task) in tasks.iter().enumerate() {
        let objective = NavigationObjective::new(arch, task);
        let phase_config = EsConfig {
            master_seed: phase_seed(config.master_seed, phase),
            weighting: WeightingConfig {
                metric: method.metric(),
                ..config.weighting
            },
            ..config.clone()
        };
        let result = if phase == 0 || method == Method::Fs {
            train_from_scratch(&objective, &phase_config, workers)?
        } else {
            let prev = results.last().expect("previous phase exists");
            adapt(
                &prev.theta_star,
                prev.bc_star.as_ref(),
                &objective,
                &phase_config,
                workers,
            )?
        };
        results.push(result);
    }
    Ok(results)
}
