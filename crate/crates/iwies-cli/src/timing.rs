//! Scalability sweep: identical seeded workload at several worker counts.
//!
//! The workload is the first adaptation phase of run 0: phase one is trained
//! once (shared), then each configured method's adaptation is timed at every
//! worker count. Final parameters must be bit-identical across counts; any
//! difference is a hard failure.

use std::fmt::Write as _;
use std::time::Instant;

use iwies::engine::{adapt, train_from_scratch, Method};
use iwies::error::{Error, Result};
use iwies::objective::NavigationObjective;
use iwies::Real;

use crate::experiment::ExperimentConfig;

#[derive(Debug, Clone)]
pub struct TimingRow {
    pub method: Method,
    pub workers: usize,
    pub seconds: f64,
}

#[derive(Debug, Clone)]
pub struct TimingReport {
    pub rows: Vec<TimingRow>,
}

impl TimingReport {
    pub fn seconds(&self, method: Method, workers: usize) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.method == method && r.workers == workers)
            .map(|r| r.seconds)
    }

    /// Methods-by-worker-count table.
    pub fn render_table(&self, worker_counts: &[usize]) -> String {
        let mut out = String::new();
        write!(out, "{:<10}", "method").unwrap();
        for w in worker_counts {
            write!(out, " {:>9}", format!("{w}w")).unwrap();
        }
        out.push('\n');
        let mut methods: Vec<Method> = Vec::new();
        for row in &self.rows {
            if !methods.contains(&row.method) {
                methods.push(row.method);
            }
        }
        for method in methods {
            write!(out, "{:<10}", method.tag()).unwrap();
            for &w in worker_counts {
                match self.seconds(method, w) {
                    Some(s) => write!(out, " {:>8.2}s", s).unwrap(),
                    None => write!(out, " {:>9}", "-").unwrap(),
                }
            }
            out.push('\n');
        }
        out
    }
}

/// Run the sweep. Every `(method, worker count)` cell runs the identical
/// seeded adaptation; wall time goes into the table and the resulting
/// parameters are compared bit-for-bit across counts.
pub fn timing_sweep(
    config: &ExperimentConfig,
    worker_counts: &[usize],
) -> Result<TimingReport> {
    if worker_counts.is_empty() {
        return Err(Error::InvalidArgument("worker count list is empty".into()));
    }
    if worker_counts.iter().any(|&w| w == 0) {
        return Err(Error::InvalidArgument("worker counts must be >= 1".into()));
    }
    let t1 = config.task_for(0, 0)?;
    let t2 = config.task_for(0, 1)?;

    // shared phase-one optimum, not part of the timed workload
    let phase1 = {
        let objective = NavigationObjective::new(&config.arch, &t1);
        let cfg = crate::timing::phase_cfg(config, 0, Method::Ca);
        train_from_scratch(&objective, &cfg, *worker_counts.iter().max().unwrap())?
    };

    let mut rows = Vec::new();
    for &method in &config.methods {
        let objective = NavigationObjective::new(&config.arch, &t2);
        let cfg = phase_cfg(config, 1, method);
        let mut reference: Option<Vec<u64>> = None;
        for &workers in worker_counts {
            let started = Instant::now();
            let result = if method == Method::Fs {
                train_from_scratch(&objective, &cfg, workers)?
            } else {
                adapt(
                    &phase1.theta_star,
                    phase1.bc_star.as_ref(),
                    &objective,
                    &cfg,
                    workers,
                )?
            };
            let seconds = started.elapsed().as_secs_f64();
            let bits: Vec<u64> = result
                .theta_star
                .as_slice()
                .iter()
                .map(|v| v.to_bits())
                .collect();
            match &reference {
                None => reference = Some(bits),
                Some(expect) => {
                    if *expect != bits {
                        return Err(Error::Protocol(format!(
                            "final parameters differ between {} workers and {workers} workers \
                             for method {}",
                            worker_counts[0],
                            method.tag()
                        )));
                    }
                }
            }
            rows.push(TimingRow {
                method,
                workers,
                seconds,
            });
        }
    }
    Ok(TimingReport { rows })
}

fn phase_cfg(
    config: &ExperimentConfig,
    phase: usize,
    method: Method,
) -> iwies::engine::EsConfig<Real> {
    use iwies::engine::phase_seed;
    use iwies::weighting::WeightingConfig;
    iwies::engine::EsConfig {
        master_seed: phase_seed(config.es_seed_for(0, 0), phase),
        generations: config.generations_per_phase,
        weighting: WeightingConfig {
            metric: method.metric(),
            ..config.es.weighting
        },
        ..config.es.clone()
    }
}
