//! Flat `key = value` configuration files with dotted keys.
//!
//! Every key has a default, so an empty file runs the goal-change navigation
//! case at the standard hyperparameters. `#` starts a comment; blank lines
//! are ignored. Command-line flags override file values.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use iwies::engine::{EsConfig, FitnessShaping, Method};
use iwies::env::{Point2, Rect, TaskKind};
use iwies::error::{Error, Result};
use iwies::policy::MlpArchitecture;
use iwies::weighting::{WeightMetric, WeightingConfig};
use iwies::Real;

/// Harness-level settings assembled from defaults, a config file, and flags.
#[derive(Debug, Clone, PartialEq)]
pub struct HarnessConfig {
    pub task: TaskKind,
    pub phases: usize,
    pub runs: usize,
    pub trials_per_run: usize,
    pub methods: Vec<Method>,
    pub workers: usize,
    pub seed: u64,
    pub out: PathBuf,
    /// `None` selects the per-task default generation budget.
    pub generations: Option<usize>,
    pub population: usize,
    pub sigma: Real,
    pub alpha: Real,
    pub shaping: FitnessShaping,
    pub rho0: Real,
    pub delta_rho: Real,
    pub normalize_metrics: bool,
    pub horizon: usize,
    pub goal_tolerance: Real,
    pub control_cost: Real,
    pub goal_region_phase1: Rect<Real>,
    pub goal_region_phase2: Rect<Real>,
    pub hidden: Vec<usize>,
    pub action_clip: Real,
}

impl Default for HarnessConfig {
    fn default() -> Self {
        let quadrant = Rect::new(Point2::new(0.0, 0.0), Point2::new(0.5, 0.5))
            .expect("static rectangle");
        Self {
            task: TaskKind::GoalNav,
            phases: 2,
            runs: 10,
            trials_per_run: 1,
            methods: Method::ALL.to_vec(),
            workers: 1,
            seed: 42,
            out: PathBuf::from("results"),
            generations: None,
            population: 16,
            sigma: 0.05,
            alpha: 0.05,
            shaping: FitnessShaping::CenteredRank,
            rho0: 0.5,
            delta_rho: 0.01,
            normalize_metrics: true,
            horizon: 100,
            goal_tolerance: 0.01,
            control_cost: 0.05,
            goal_region_phase1: quadrant,
            goal_region_phase2: quadrant,
            hidden: vec![128, 128],
            action_clip: 0.1,
        }
    }
}

fn task_from_cli(name: &str) -> Result<TaskKind> {
    match name {
        "case1" => Ok(TaskKind::GoalNav),
        "case2" => Ok(TaskKind::ObstacleNav),
        "puddle" => Ok(TaskKind::PuddleNav),
        other => Err(Error::InvalidArgument(format!(
            "unknown task `{other}` (expected case1, case2, or puddle)"
        ))),
    }
}

/// Per-task default generation budget.
pub fn default_generations(task: TaskKind) -> usize {
    match task {
        TaskKind::GoalNav => 200,
        TaskKind::ObstacleNav => 1000,
        TaskKind::PuddleNav => 500,
    }
}

impl HarnessConfig {
    /// Load from a file on top of the defaults.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut config = Self::default();
        config.apply_text(&text)?;
        Ok(config)
    }

    /// Apply `key = value` lines.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        let mut seen = BTreeSet::new();
        for (index, raw) in text.lines().enumerate() {
            let line_no = index + 1;
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: line_no,
                message: format!("expected `key = value`, got `{line}`"),
            })?;
            let key = key.trim();
            let value = value.trim();
            if !seen.insert(key.to_string()) {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("duplicate key `{key}`"),
                });
            }
            self.apply_key(key, value).map_err(|e| Error::Parse {
                line: line_no,
                message: e.to_string(),
            })?;
        }
        Ok(())
    }

    fn apply_key(&mut self, key: &str, value: &str) -> Result<()> {
        let bad = |what: &str| Error::InvalidArgument(format!("bad {what} `{value}`"));
        match key {
            "task" => self.task = task_from_cli(value)?,
            "phases" => self.phases = parse_positive(value, "phases")?,
            "runs" => self.runs = parse_positive(value, "runs")?,
            "trials_per_run" => {
                self.trials_per_run = parse_positive(value, "trials_per_run")?
            }
            "methods" => {
                let methods = value
                    .split(',')
                    .map(|m| m.trim().parse::<Method>())
                    .collect::<Result<Vec<_>>>()?;
                if methods.is_empty() {
                    return Err(Error::InvalidArgument("methods list is empty".into()));
                }
                self.methods = methods;
            }
            "workers" => self.workers = parse_positive(value, "workers")?,
            "seed" => self.seed = value.parse().map_err(|_| bad("seed"))?,
            "out" => self.out = PathBuf::from(value),
            "generations" => self.generations = Some(parse_positive(value, "generations")?),
            "es.population" => self.population = parse_positive(value, "es.population")?,
            "es.sigma" => self.sigma = parse_real(value, "es.sigma")?,
            "es.alpha" => self.alpha = parse_real(value, "es.alpha")?,
            "es.shaping" => {
                self.shaping = match value {
                    "raw" => FitnessShaping::Raw,
                    "centered-rank" => FitnessShaping::CenteredRank,
                    _ => return Err(bad("es.shaping (raw or centered-rank)")),
                }
            }
            "es.rho0" => self.rho0 = parse_real(value, "es.rho0")?,
            "es.delta_rho" => self.delta_rho = parse_real(value, "es.delta_rho")?,
            "es.normalize_metrics" => {
                self.normalize_metrics = value.parse().map_err(|_| bad("es.normalize_metrics"))?
            }
            "env.horizon" => self.horizon = parse_positive(value, "env.horizon")?,
            "env.goal_tolerance" => self.goal_tolerance = parse_real(value, "env.goal_tolerance")?,
            "env.control_cost" => self.control_cost = parse_real(value, "env.control_cost")?,
            "env.goal_region_phase1" => self.goal_region_phase1 = parse_rect(value)?,
            "env.goal_region_phase2" => self.goal_region_phase2 = parse_rect(value)?,
            "policy.hidden" => {
                self.hidden = if value.is_empty() {
                    Vec::new()
                } else {
                    value
                        .split(',')
                        .map(|h| parse_positive(h.trim(), "policy.hidden"))
                        .collect::<Result<Vec<_>>>()?
                };
            }
            "policy.action_clip" => self.action_clip = parse_real(value, "policy.action_clip")?,
            other => {
                return Err(Error::InvalidArgument(format!("unknown key `{other}`")));
            }
        }
        Ok(())
    }

    /// Apply command-line flag overrides.
    pub fn apply_overrides(&mut self, overrides: &CliOverrides) -> Result<()> {
        if let Some(task) = &overrides.task {
            self.task = task_from_cli(task)?;
        }
        if let Some(seed) = overrides.seed {
            self.seed = seed;
        }
        if let Some(workers) = overrides.workers {
            if workers == 0 {
                return Err(Error::InvalidArgument("workers must be >= 1".into()));
            }
            self.workers = workers;
        }
        if let Some(out) = &overrides.out {
            self.out = out.clone();
        }
        if let Some(generations) = overrides.generations {
            if generations == 0 {
                return Err(Error::InvalidArgument("generations must be >= 1".into()));
            }
            self.generations = Some(generations);
        }
        Ok(())
    }

    pub fn generations(&self) -> usize {
        self.generations.unwrap_or(default_generations(self.task))
    }

    pub fn arch(&self) -> Result<MlpArchitecture<Real>> {
        MlpArchitecture::new(2, self.hidden.clone(), 2, self.action_clip)
    }

    pub fn es_config(&self) -> EsConfig<Real> {
        EsConfig {
            population: self.population,
            sigma: self.sigma,
            alpha: self.alpha,
            generations: self.generations(),
            weighting: WeightingConfig {
                metric: WeightMetric::Uniform,
                rho0: self.rho0,
                delta_rho: self.delta_rho,
                normalize_metrics: self.normalize_metrics,
            },
            fitness_shaping: self.shaping,
            master_seed: self.seed,
        }
    }

    /// Goal sampling region for a phase (phase 0 is the initial environment).
    pub fn goal_region(&self, phase: usize) -> Rect<Real> {
        if phase == 0 {
            self.goal_region_phase1
        } else {
            self.goal_region_phase2
        }
    }
}

/// Flag values that override config-file settings.
#[derive(Debug, Default, Clone)]
pub struct CliOverrides {
    pub task: Option<String>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub out: Option<PathBuf>,
    pub generations: Option<usize>,
}

fn parse_positive(value: &str, what: &str) -> Result<usize> {
    let n: usize = value
        .parse()
        .map_err(|_| Error::InvalidArgument(format!("bad {what} `{value}`")))?;
    if n == 0 {
        return Err(Error::InvalidArgument(format!("{what} must be >= 1")));
    }
    Ok(n)
}

fn parse_real(value: &str, what: &str) -> Result<Real> {
    let x: Real = value
        .parse()
        .map_err(|_| Error::InvalidArgument(format!("bad {what} `{value}`")))?;
    if !x.is_finite() {
        return Err(Error::InvalidArgument(format!("{what} must be finite")));
    }
    Ok(x)
}

/// `xmin,ymin,xmax,ymax`
fn parse_rect(value: &str) -> Result<Rect<Real>> {
    let parts: Vec<&str> = value.split(',').map(str::trim).collect();
    if parts.len() != 4 {
        return Err(Error::InvalidArgument(format!(
            "bad rectangle `{value}` (expected xmin,ymin,xmax,ymax)"
        )));
    }
    let nums = parts
        .iter()
        .map(|p| parse_real(p, "rectangle coordinate"))
        .collect::<Result<Vec<_>>>()?;
    Rect::new(Point2::new(nums[0], nums[1]), Point2::new(nums[2], nums[3]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_text_keeps_defaults() {
        let mut config = HarnessConfig::default();
        config.apply_text("").unwrap();
        assert_eq!(config, HarnessConfig::default());
        assert_eq!(config.generations(), 200);
        assert_eq!(config.population, 16);
        assert_eq!(config.sigma, 0.05);
        assert_eq!(config.hidden, vec![128, 128]);
    }

    #[test]
    fn keys_apply_and_comments_are_ignored() {
        let mut config = HarnessConfig::default();
        config
            .apply_text(
                "# a comment\n\
                 task = case2\n\
                 es.sigma = 0.1  # trailing comment\n\
                 methods = ca, iwies-mix\n\
                 env.goal_region_phase2 = -0.5,-0.5,0,0\n\
                 policy.hidden = 32,16\n",
            )
            .unwrap();
        assert_eq!(config.task, TaskKind::ObstacleNav);
        assert_eq!(config.sigma, 0.1);
        assert_eq!(config.methods, vec![Method::Ca, Method::IwiesMix]);
        assert_eq!(config.hidden, vec![32, 16]);
        assert_eq!(config.generations(), 1000);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let mut config = HarnessConfig::default();
        let err = config.apply_text("task = case1\nnot a line\n").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected {other}"),
        }

        let mut config = HarnessConfig::default();
        let err = config
            .apply_text("es.alpha = 0.1\nes.alpha = 0.2\n")
            .unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn unknown_key_is_rejected() {
        let mut config = HarnessConfig::default();
        assert!(config.apply_text("es.bogus = 1\n").is_err());
    }

    #[test]
    fn overrides_win_over_file_values() {
        let mut config = HarnessConfig::default();
        config.apply_text("seed = 7\nworkers = 2\n").unwrap();
        config
            .apply_overrides(&CliOverrides {
                seed: Some(99),
                workers: None,
                task: Some("puddle".into()),
                out: None,
                generations: Some(50),
            })
            .unwrap();
        assert_eq!(config.seed, 99);
        assert_eq!(config.workers, 2);
        assert_eq!(config.task, TaskKind::PuddleNav);
        assert_eq!(config.generations(), 50);
    }
}
