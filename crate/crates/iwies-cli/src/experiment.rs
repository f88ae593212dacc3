//! The repeated-change statistical protocol.
//!
//! One *run* samples a fresh environment sequence, optimizes phase one once,
//! then lets every configured method adapt through the remaining phases from
//! that shared phase-one optimum, with identical perturbation streams. Method
//! differences within a run are therefore attributable to the adaptation rule
//! alone. Summary statistics are means and standard errors across runs.

use std::path::PathBuf;
use std::time::Instant;

use iwies::behavior::BehaviorCharacterization;
use iwies::engine::{
    adapt, phase_seed, train_from_scratch, EsConfig, Method, PhaseResult,
};
use iwies::env::{sample_task, Rect, TaskKind, TaskSpec};
use iwies::error::{Error, Result};
use iwies::objective::NavigationObjective;
use iwies::parallel::mix_seeds;
use iwies::policy::{MlpArchitecture, ParameterVector};
use iwies::weighting::WeightingConfig;
use iwies::Real;

use crate::config::HarnessConfig;
use crate::report::{mean, std_error, CsvRow, MethodSummary, RunSummary};

/// Everything needed to execute one experiment.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub task_kind: TaskKind,
    pub phases: usize,
    pub generations_per_phase: usize,
    pub runs: usize,
    pub trials_per_run: usize,
    pub methods: Vec<Method>,
    pub es: EsConfig<Real>,
    pub arch: MlpArchitecture<Real>,
    pub goal_region_phase1: Rect<Real>,
    pub goal_region_phase2: Rect<Real>,
    pub horizon: usize,
    pub goal_tolerance: Real,
    pub control_cost: Real,
    pub output_dir: PathBuf,
    pub workers: usize,
}

impl ExperimentConfig {
    pub fn from_harness(config: &HarnessConfig) -> Result<Self> {
        if config.methods.is_empty() {
            return Err(Error::InvalidArgument("methods list is empty".into()));
        }
        Ok(Self {
            task_kind: config.task,
            phases: config.phases,
            generations_per_phase: config.generations(),
            runs: config.runs,
            trials_per_run: config.trials_per_run,
            methods: config.methods.clone(),
            es: config.es_config(),
            arch: config.arch()?,
            goal_region_phase1: config.goal_region_phase1,
            goal_region_phase2: config.goal_region_phase2,
            horizon: config.horizon,
            goal_tolerance: config.goal_tolerance,
            control_cost: config.control_cost,
            output_dir: config.out.clone(),
            workers: config.workers,
        })
    }

    fn region(&self, phase: usize) -> Rect<Real> {
        if phase == 0 {
            self.goal_region_phase1
        } else {
            self.goal_region_phase2
        }
    }

    /// Sample the task of `(run, phase)`; shared by all methods of the run.
    pub fn task_for(&self, run: usize, phase: usize) -> Result<TaskSpec<Real>> {
        let seed = mix_seeds(
            mix_seeds(self.es.master_seed, 0x7A5C_0000 + run as u64),
            phase as u64,
        );
        let mut task = sample_task(self.task_kind, seed, self.region(phase))?;
        task.horizon = self.horizon;
        task.goal_tolerance = self.goal_tolerance;
        task.control_cost_coeff = self.control_cost;
        task.validate()?;
        Ok(task)
    }

    /// Optimizer seed of `(run, trial)`; shared by all methods.
    pub fn es_seed_for(&self, run: usize, trial: usize) -> u64 {
        mix_seeds(
            mix_seeds(self.es.master_seed, 0xE5EE_0000 + run as u64),
            trial as u64,
        )
    }

    fn phase_config(&self, run: usize, trial: usize, phase: usize, method: Method) -> EsConfig<Real> {
        EsConfig {
            master_seed: phase_seed(self.es_seed_for(run, trial), phase),
            generations: self.generations_per_phase,
            weighting: WeightingConfig {
                metric: method.metric(),
                ..self.es.weighting
            },
            ..self.es.clone()
        }
    }
}

/// Per-method outcome of one `(run, trial)`.
#[derive(Debug, Clone)]
pub struct MethodRunOutcome {
    /// Mean of the adaptation phases' average returns (phases after the first).
    pub adaptation_average_return: Real,
    /// Generation-0 return of the first adaptation phase.
    pub jumpstart_return: Real,
    pub final_theta: ParameterVector<Real>,
}

/// Full outcome of an experiment: summary plus reproducible artifacts.
#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub summary: RunSummary,
    pub csv_rows: Vec<CsvRow>,
    /// One line per `(run, phase)` task, in sampling order.
    pub task_log: Vec<String>,
    /// Outcome of trial 0, keyed by `(run, method index)` in execution order.
    pub method_outcomes: Vec<MethodRunOutcome>,
}

impl ExperimentOutcome {
    pub fn outcome_for(&self, run: usize, method: Method, config: &ExperimentConfig) -> Option<&MethodRunOutcome> {
        let mi = config.methods.iter().position(|&m| m == method)?;
        self.method_outcomes.get(run * config.methods.len() + mi)
    }
}

struct PhaseChainState {
    theta: ParameterVector<Real>,
    behavior: Option<BehaviorCharacterization<Real>>,
}

/// Execute the full protocol. Pure function of the configuration: re-running
/// reproduces byte-identical CSV rows and task logs.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutcome> {
    config.es.validate()?;
    if config.phases < 1 {
        return Err(Error::InvalidArgument("phases must be >= 1".into()));
    }

    let mut csv_rows = Vec::new();
    let mut task_log = Vec::new();
    let mut method_outcomes = Vec::new();
    // per method: per-run statistics (averaged over trials)
    let mut adaptation_returns = vec![Vec::with_capacity(config.runs); config.methods.len()];
    let mut jumpstart_returns = vec![Vec::with_capacity(config.runs); config.methods.len()];
    let mut wall_seconds = vec![0.0f64; config.methods.len()];

    for run in 0..config.runs {
        let tasks: Vec<TaskSpec<Real>> = (0..config.phases)
            .map(|phase| config.task_for(run, phase))
            .collect::<Result<_>>()?;
        for task in &tasks {
            task_log.push(format!("run={run} {task}"));
        }

        let mut run_adaptation = vec![Vec::new(); config.methods.len()];
        let mut run_jumpstart = vec![Vec::new(); config.methods.len()];

        for trial in 0..config.trials_per_run {
            // Phase one is method-independent: same seeds, same task, uniform
            // weights. Optimize it once and share the optimum.
            let phase1 = {
                let objective = NavigationObjective::new(&config.arch, &tasks[0]);
                let cfg = config.phase_config(run, trial, 0, Method::Ca);
                train_from_scratch(&objective, &cfg, config.workers)?
            };

            for (mi, &method) in config.methods.iter().enumerate() {
                let started = Instant::now();
                let mut chain = PhaseChainState {
                    theta: phase1.theta_star.clone(),
                    behavior: phase1.bc_star.clone(),
                };
                let mut phase_averages = Vec::with_capacity(config.phases.saturating_sub(1));
                let mut jumpstart = Real::NAN;

                if trial == 0 {
                    push_rows(&mut csv_rows, run, method, 0, &phase1);
                }

                for phase in 1..config.phases {
                    let objective = NavigationObjective::new(&config.arch, &tasks[phase]);
                    let cfg = config.phase_config(run, trial, phase, method);
                    let result = if method == Method::Fs {
                        train_from_scratch(&objective, &cfg, config.workers)?
                    } else {
                        adapt(
                            &chain.theta,
                            chain.behavior.as_ref(),
                            &objective,
                            &cfg,
                            config.workers,
                        )?
                    };
                    if phase == 1 {
                        jumpstart = result
                            .reports
                            .first()
                            .map(|r| r.unperturbed_return)
                            .unwrap_or(Real::NAN);
                    }
                    phase_averages.push(result.average_return);
                    if trial == 0 {
                        push_rows(&mut csv_rows, run, method, phase, &result);
                    }
                    chain = PhaseChainState {
                        theta: result.theta_star.clone(),
                        behavior: result.bc_star.clone(),
                    };
                    if trial == 0 && phase == config.phases - 1 {
                        method_outcomes.push(MethodRunOutcome {
                            adaptation_average_return: mean(&phase_averages),
                            jumpstart_return: jumpstart,
                            final_theta: result.theta_star,
                        });
                    }
                }
                if config.phases == 1 && trial == 0 {
                    method_outcomes.push(MethodRunOutcome {
                        adaptation_average_return: phase1.average_return,
                        jumpstart_return: phase1
                            .reports
                            .first()
                            .map(|r| r.unperturbed_return)
                            .unwrap_or(Real::NAN),
                        final_theta: phase1.theta_star.clone(),
                    });
                }

                let adaptation_mean = if config.phases > 1 {
                    mean(&phase_averages)
                } else {
                    phase1.average_return
                };
                run_adaptation[mi].push(adaptation_mean);
                run_jumpstart[mi].push(jumpstart);
                wall_seconds[mi] += started.elapsed().as_secs_f64();
            }
        }

        for mi in 0..config.methods.len() {
            adaptation_returns[mi].push(mean(&run_adaptation[mi]));
            jumpstart_returns[mi].push(mean(&run_jumpstart[mi]));
        }
    }

    let methods = config
        .methods
        .iter()
        .enumerate()
        .map(|(mi, &method)| MethodSummary {
            method,
            mean_average_return: mean(&adaptation_returns[mi]),
            std_error: std_error(&adaptation_returns[mi]),
            mean_jumpstart_return: mean(&jumpstart_returns[mi]),
            jumpstart_std_error: std_error(&jumpstart_returns[mi]),
            wall_seconds: wall_seconds[mi],
        })
        .collect();

    Ok(ExperimentOutcome {
        summary: RunSummary {
            runs: config.runs,
            methods,
        },
        csv_rows,
        task_log,
        method_outcomes,
    })
}

fn push_rows(
    rows: &mut Vec<CsvRow>,
    run: usize,
    method: Method,
    phase: usize,
    result: &PhaseResult<Real>,
) {
    for report in &result.reports {
        rows.push(CsvRow::from_report(run, method, phase, report));
    }
}

/// Write the outcome artifacts: `results.csv`, `summary.txt`, `summary.kv`,
/// and `tasks.log` under the output directory.
pub fn write_artifacts(config: &ExperimentConfig, outcome: &ExperimentOutcome) -> Result<()> {
    std::fs::create_dir_all(&config.output_dir)?;
    crate::report::write_csv(&config.output_dir.join("results.csv"), &outcome.csv_rows)?;
    std::fs::write(
        config.output_dir.join("summary.txt"),
        outcome.summary.render_table(),
    )?;
    std::fs::write(
        config.output_dir.join("summary.kv"),
        outcome.summary.render_kv(),
    )?;
    std::fs::write(
        config.output_dir.join("tasks.log"),
        outcome.task_log.join("\n") + "\n",
    )?;
    Ok(())
}

/// Drop a marker file recording a failure that interrupted an experiment.
pub fn write_partial_marker(config: &ExperimentConfig, error: &Error) {
    let _ = std::fs::create_dir_all(&config.output_dir);
    let _ = std::fs::write(
        config.output_dir.join("partial.marker"),
        format!("experiment aborted: {error}\n"),
    );
}
