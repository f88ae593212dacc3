//! 2D navigation environments: stationary point-mass MDPs, task samplers for
//! the changing-environment protocol, and the rollout loop.
//!
//! The arena is the axis-aligned square `[-0.5, 0.5]^2`. Positions are clipped
//! at the walls. A step that would land inside the obstacle square or a puddle
//! disc bounces: the agent keeps its previous position. Reward is the negative
//! squared distance to the goal minus a small control cost; an episode ends
//! when the agent is within `goal_tolerance` of the goal or at the horizon.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::policy::{forward, MlpArchitecture, ParameterVector};
use crate::scalar::Scalar;

/// Half-width of the square arena.
pub fn arena_half_width<T: Scalar>() -> T {
    T::from_real(0.5)
}

/// Half-width of the square obstacle (the obstacle is 0.6 x 0.6).
pub fn obstacle_half_width<T: Scalar>() -> T {
    T::from_real(0.3)
}

/// Maximum rejection-sampling attempts before `sample_task` gives up.
pub const MAX_SAMPLE_ATTEMPTS: usize = 10_000;

/// A 2D point or displacement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point2<T> {
    pub x: T,
    pub y: T,
}

impl<T: Scalar> Point2<T> {
    pub fn new(x: T, y: T) -> Self {
        Self { x, y }
    }

    pub fn distance(self, other: Self) -> T {
        self.distance_sq(other).sqrt()
    }

    pub fn distance_sq(self, other: Self) -> T {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    pub fn norm_sq(self) -> T {
        self.x * self.x + self.y * self.y
    }

    fn clamp_to_arena(self) -> Self {
        let half = arena_half_width::<T>();
        Self {
            x: self.x.min(half).max(-half),
            y: self.y.min(half).max(-half),
        }
    }
}

/// Axis-aligned rectangle, used for sampling regions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect<T> {
    pub min: Point2<T>,
    pub max: Point2<T>,
}

impl<T: Scalar> Rect<T> {
    pub fn new(min: Point2<T>, max: Point2<T>) -> Result<Self> {
        if !(min.x <= max.x && min.y <= max.y) {
            return Err(Error::InvalidArgument("rectangle min exceeds max".into()));
        }
        Ok(Self { min, max })
    }

    /// The full arena.
    pub fn arena() -> Self {
        let half = arena_half_width::<T>();
        Self {
            min: Point2::new(-half, -half),
            max: Point2::new(half, half),
        }
    }

    pub fn contains(&self, p: Point2<T>) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> Point2<T> {
        let ux = T::uniform_01(rng);
        let uy = T::uniform_01(rng);
        Point2::new(
            self.min.x + (self.max.x - self.min.x) * ux,
            self.min.y + (self.max.y - self.min.y) * uy,
        )
    }
}

/// Environment family selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TaskKind {
    /// Goal position changes between phases; open arena.
    GoalNav,
    /// Fixed start/goal; a 0.6 x 0.6 square obstacle moves between phases.
    ObstacleNav,
    /// Goal and three circular puddles move between phases.
    PuddleNav,
}

impl TaskKind {
    pub fn tag(self) -> &'static str {
        match self {
            TaskKind::GoalNav => "goal-nav",
            TaskKind::ObstacleNav => "obstacle-nav",
            TaskKind::PuddleNav => "puddle-nav",
        }
    }
}

impl FromStr for TaskKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "goal-nav" => Ok(TaskKind::GoalNav),
            "obstacle-nav" => Ok(TaskKind::ObstacleNav),
            "puddle-nav" => Ok(TaskKind::PuddleNav),
            other => Err(Error::InvalidArgument(format!(
                "unknown task kind `{other}`"
            ))),
        }
    }
}

/// A circular puddle the agent bounces off.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Puddle<T> {
    pub center: Point2<T>,
    pub radius: T,
}

impl<T: Scalar> Puddle<T> {
    pub fn contains(&self, p: Point2<T>) -> bool {
        p.distance(self.center) <= self.radius
    }
}

/// Variant-specific landscape of a task.
#[derive(Debug, Clone, PartialEq)]
pub enum Landscape<T> {
    Open,
    Obstacle { center: Point2<T> },
    Puddles { puddles: [Puddle<T>; 3] },
}

/// One stationary environment instance.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskSpec<T> {
    pub landscape: Landscape<T>,
    pub start: Point2<T>,
    pub goal: Point2<T>,
    pub horizon: usize,
    pub goal_tolerance: T,
    pub control_cost_coeff: T,
}

pub const DEFAULT_HORIZON: usize = 100;

pub fn default_goal_tolerance<T: Scalar>() -> T {
    T::from_real(0.01)
}

pub fn default_control_cost<T: Scalar>() -> T {
    T::from_real(0.05)
}

impl<T: Scalar> TaskSpec<T> {
    pub fn kind(&self) -> TaskKind {
        match self.landscape {
            Landscape::Open => TaskKind::GoalNav,
            Landscape::Obstacle { .. } => TaskKind::ObstacleNav,
            Landscape::Puddles { .. } => TaskKind::PuddleNav,
        }
    }

    /// Check the structural invariants of the task.
    pub fn validate(&self) -> Result<()> {
        let arena = Rect::arena();
        if !arena.contains(self.start) || !arena.contains(self.goal) {
            return Err(Error::InvalidArgument(
                "start and goal must lie inside the arena".into(),
            ));
        }
        if self.horizon == 0 {
            return Err(Error::InvalidArgument("horizon must be positive".into()));
        }
        if !(self.goal_tolerance > T::zero()) {
            return Err(Error::InvalidArgument(
                "goal_tolerance must be positive".into(),
            ));
        }
        if self.control_cost_coeff < T::zero() {
            return Err(Error::InvalidArgument(
                "control_cost_coeff must be nonnegative".into(),
            ));
        }
        if let Landscape::Puddles { puddles } = &self.landscape {
            for (i, a) in puddles.iter().enumerate() {
                if !(a.radius > T::zero()) {
                    return Err(Error::InvalidArgument("puddle radius must be positive".into()));
                }
                if a.contains(self.start) || a.contains(self.goal) {
                    return Err(Error::InvalidArgument(
                        "puddle covers start or goal".into(),
                    ));
                }
                for b in &puddles[i + 1..] {
                    if a.radius == b.radius {
                        return Err(Error::InvalidArgument(
                            "puddle radii must be pairwise distinct".into(),
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    fn blocked(&self, p: Point2<T>) -> bool {
        match &self.landscape {
            Landscape::Open => false,
            Landscape::Obstacle { center } => {
                let half = obstacle_half_width::<T>();
                (p.x - center.x).abs() <= half && (p.y - center.y).abs() <= half
            }
            Landscape::Puddles { puddles } => puddles.iter().any(|pd| pd.contains(p)),
        }
    }
}

/// Outcome of one environment transition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepResult<T> {
    pub next_state: Point2<T>,
    pub reward: T,
    pub done: bool,
}

/// One rollout: visited states, actions, rewards, and the undiscounted return.
#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeTrace<T> {
    pub states: Vec<Point2<T>>,
    pub actions: Vec<Point2<T>>,
    pub rewards: Vec<T>,
    pub episode_return: T,
}

impl<T: Scalar> EpisodeTrace<T> {
    /// Number of executed steps.
    pub fn len(&self) -> usize {
        self.rewards.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rewards.is_empty()
    }
}

/// Initial state of an episode (the fixed start point).
pub fn reset<T: Scalar>(task: &TaskSpec<T>) -> Point2<T> {
    task.start
}

/// One environment transition under an already-clipped action.
pub fn step<T: Scalar>(
    task: &TaskSpec<T>,
    state: Point2<T>,
    action: Point2<T>,
) -> Result<StepResult<T>> {
    if !action.x.is_finite() || !action.y.is_finite() {
        return Err(Error::NonFinite("action"));
    }
    let candidate = Point2::new(state.x + action.x, state.y + action.y).clamp_to_arena();
    let next_state = if task.blocked(candidate) { state } else { candidate };
    let reward = -next_state.distance_sq(task.goal) - task.control_cost_coeff * action.norm_sq();
    let done = next_state.distance(task.goal) <= task.goal_tolerance;
    Ok(StepResult {
        next_state,
        reward,
        done,
    })
}

/// Execute the policy in the task until termination or the horizon.
///
/// Bit-deterministic for fixed `(task, theta)`.
pub fn rollout<T: Scalar>(
    task: &TaskSpec<T>,
    arch: &MlpArchitecture<T>,
    theta: &ParameterVector<T>,
) -> Result<EpisodeTrace<T>> {
    let mut state = reset(task);
    let mut states = vec![state];
    let mut actions = Vec::new();
    let mut rewards = Vec::new();

    // A start inside the goal tolerance terminates immediately.
    if state.distance(task.goal) <= task.goal_tolerance {
        return Ok(EpisodeTrace {
            states,
            actions,
            rewards,
            episode_return: T::zero(),
        });
    }

    let mut episode_return = T::zero();
    for _ in 0..task.horizon {
        let out = forward(arch, theta, &[state.x, state.y])?;
        let action = Point2::new(out[0], out[1]);
        let result = step(task, state, action)?;
        state = result.next_state;
        states.push(state);
        actions.push(action);
        rewards.push(result.reward);
        episode_return += result.reward;
        if result.done {
            break;
        }
    }
    Ok(EpisodeTrace {
        states,
        actions,
        rewards,
        episode_return,
    })
}

fn case_start<T: Scalar>(kind: TaskKind) -> Point2<T> {
    match kind {
        // Goal-change and puddle tasks start at the center; the obstacle task
        // crosses the arena bottom-to-top.
        TaskKind::GoalNav | TaskKind::PuddleNav => Point2::new(T::zero(), T::zero()),
        TaskKind::ObstacleNav => Point2::new(T::zero(), -arena_half_width::<T>()),
    }
}

/// Sample a stationary task instance. Deterministic per seed.
///
/// * `GoalNav`: goal uniform in `region`.
/// * `ObstacleNav`: start `(0,-0.5)`, goal `(0,0.5)`; obstacle center uniform
///   such that the square stays inside the arena and covers neither start nor
///   goal.
/// * `PuddleNav`: goal uniform in `region`; three puddles with radii
///   `{0.08, 0.12, 0.16}` placed uniformly, rejection-sampled so no puddle
///   covers start or goal.
pub fn sample_task<T: Scalar>(kind: TaskKind, seed: u64, region: Rect<T>) -> Result<TaskSpec<T>> {
    let arena = Rect::arena();
    if !arena.contains(region.min) || !arena.contains(region.max) {
        return Err(Error::InvalidArgument(
            "sampling region must lie inside the arena".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = case_start::<T>(kind);
    let mut attempts = 0usize;
    let bump = |attempts: &mut usize| -> Result<()> {
        *attempts += 1;
        if *attempts > MAX_SAMPLE_ATTEMPTS {
            return Err(Error::SamplingExhausted {
                attempts: MAX_SAMPLE_ATTEMPTS,
            });
        }
        Ok(())
    };

    let task = match kind {
        TaskKind::GoalNav => TaskSpec {
            landscape: Landscape::Open,
            start,
            goal: region.sample(&mut rng),
            horizon: DEFAULT_HORIZON,
            goal_tolerance: default_goal_tolerance(),
            control_cost_coeff: default_control_cost(),
        },
        TaskKind::ObstacleNav => {
            let goal = Point2::new(T::zero(), arena_half_width::<T>());
            let half = obstacle_half_width::<T>();
            let reach = arena_half_width::<T>() - half;
            let center_region = Rect {
                min: Point2::new(-reach, -reach),
                max: Point2::new(reach, reach),
            };
            let center = loop {
                bump(&mut attempts)?;
                let c = center_region.sample(&mut rng);
                let covers = |p: Point2<T>| (p.x - c.x).abs() <= half && (p.y - c.y).abs() <= half;
                if !covers(start) && !covers(goal) {
                    break c;
                }
            };
            TaskSpec {
                landscape: Landscape::Obstacle { center },
                start,
                goal,
                horizon: DEFAULT_HORIZON,
                goal_tolerance: default_goal_tolerance(),
                control_cost_coeff: default_control_cost(),
            }
        }
        TaskKind::PuddleNav => {
            let goal = region.sample(&mut rng);
            let radii = [0.08, 0.12, 0.16].map(T::from_real);
            let mut puddles = Vec::with_capacity(3);
            for radius in radii {
                let puddle = loop {
                    bump(&mut attempts)?;
                    let p = Puddle {
                        center: arena.sample(&mut rng),
                        radius,
                    };
                    if !p.contains(start) && !p.contains(goal) {
                        break p;
                    }
                };
                puddles.push(puddle);
            }
            TaskSpec {
                landscape: Landscape::Puddles {
                    puddles: [puddles[0], puddles[1], puddles[2]],
                },
                start,
                goal,
                horizon: DEFAULT_HORIZON,
                goal_tolerance: default_goal_tolerance(),
                control_cost_coeff: default_control_cost(),
            }
        }
    };
    task.validate()?;
    Ok(task)
}

// One-line textual task record, used in experiment logs so runs are replayable.
impl<T: Scalar> fmt::Display for TaskSpec<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} start={},{} goal={},{} horizon={} tol={} ccost={}",
            self.kind().tag(),
            self.start.x,
            self.start.y,
            self.goal.x,
            self.goal.y,
            self.horizon,
            self.goal_tolerance,
            self.control_cost_coeff
        )?;
        match &self.landscape {
            Landscape::Open => Ok(()),
            Landscape::Obstacle { center } => write!(f, " obstacle={},{}", center.x, center.y),
            Landscape::Puddles { puddles } => {
                write!(f, " puddles=")?;
                for (i, p) in puddles.iter().enumerate() {
                    if i > 0 {
                        write!(f, ";")?;
                    }
                    write!(f, "{},{},{}", p.center.x, p.center.y, p.radius)?;
                }
                Ok(())
            }
        }
    }
}

impl<T: Scalar> FromStr for TaskSpec<T> {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parse_err = |message: &str| Error::Parse {
            line: 1,
            message: message.to_string(),
        };
        let mut fields = s.split_whitespace();
        let kind: TaskKind = fields
            .next()
            .ok_or_else(|| parse_err("empty task record"))?
            .parse()?;

        let mut start = None;
        let mut goal = None;
        let mut horizon = None;
        let mut tol = None;
        let mut ccost = None;
        let mut obstacle = None;
        let mut puddles = None;

        let parse_scalar = |v: &str| -> Result<T> {
            v.parse::<T>()
                .map_err(|_| parse_err(&format!("bad numeric value `{v}`")))
        };
        let parse_point = |v: &str| -> Result<Point2<T>> {
            let mut it = v.split(',');
            let x = parse_scalar(it.next().ok_or_else(|| parse_err("missing x"))?)?;
            let y = parse_scalar(it.next().ok_or_else(|| parse_err("missing y"))?)?;
            if it.next().is_some() {
                return Err(parse_err("too many point coordinates"));
            }
            Ok(Point2::new(x, y))
        };

        for field in fields {
            let (key, value) = field
                .split_once('=')
                .ok_or_else(|| parse_err(&format!("expected key=value, got `{field}`")))?;
            match key {
                "start" => start = Some(parse_point(value)?),
                "goal" => goal = Some(parse_point(value)?),
                "horizon" => {
                    horizon = Some(value.parse::<usize>().map_err(|_| {
                        parse_err(&format!("bad horizon `{value}`"))
                    })?)
                }
                "tol" => tol = Some(parse_scalar(value)?),
                "ccost" => ccost = Some(parse_scalar(value)?),
                "obstacle" => obstacle = Some(parse_point(value)?),
                "puddles" => {
                    let mut list = Vec::new();
                    for part in value.split(';') {
                        let mut it = part.split(',');
                        let x = parse_scalar(it.next().ok_or_else(|| parse_err("missing puddle x"))?)?;
                        let y = parse_scalar(it.next().ok_or_else(|| parse_err("missing puddle y"))?)?;
                        let r = parse_scalar(it.next().ok_or_else(|| parse_err("missing puddle radius"))?)?;
                        list.push(Puddle {
                            center: Point2::new(x, y),
                            radius: r,
                        });
                    }
                    if list.len() != 3 {
                        return Err(parse_err("expected exactly 3 puddles"));
                    }
                    puddles = Some([list[0], list[1], list[2]]);
                }
                other => return Err(parse_err(&format!("unknown task field `{other}`"))),
            }
        }

        let landscape = match kind {
            TaskKind::GoalNav => Landscape::Open,
            TaskKind::ObstacleNav => Landscape::Obstacle {
                center: obstacle.ok_or_else(|| parse_err("missing obstacle field"))?,
            },
            TaskKind::PuddleNav => Landscape::Puddles {
                puddles: puddles.ok_or_else(|| parse_err("missing puddles field"))?,
            },
        };
        let task = TaskSpec {
            landscape,
            start: start.ok_or_else(|| parse_err("missing start field"))?,
            goal: goal.ok_or_else(|| parse_err("missing goal field"))?,
            horizon: horizon.ok_or_else(|| parse_err("missing horizon field"))?,
            goal_tolerance: tol.ok_or_else(|| parse_err("missing tol field"))?,
            control_cost_coeff: ccost.ok_or_else(|| parse_err("missing ccost field"))?,
        };
        task.validate()?;
        Ok(task)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::policy::init_random;

    fn goal_task(goal: Point2<f64>) -> TaskSpec<f64> {
        TaskSpec {
            landscape: Landscape::Open,
            start: Point2::new(0.0, 0.0),
            goal,
            horizon: 100,
            goal_tolerance: 0.01,
            control_cost_coeff: 0.05,
        }
    }

    #[test]
    fn reset_returns_fixed_start() {
        let t = goal_task(Point2::new(0.3, 0.3));
        assert_eq!(reset(&t), Point2::new(0.0, 0.0));
        assert_eq!(reset(&t), reset(&t));

        let t2 = sample_task::<f64>(TaskKind::ObstacleNav, 1, Rect::arena()).unwrap();
        assert_eq!(reset(&t2), Point2::new(0.0, -0.5));
        assert_eq!(t2.goal, Point2::new(0.0, 0.5));
    }

    #[test]
    fn step_reward_hand_example() {
        let t = goal_task(Point2::new(0.3, 0.3));
        let r = step(&t, Point2::new(0.0, 0.0), Point2::new(0.1, 0.1)).unwrap();
        assert_eq!(r.next_state, Point2::new(0.1, 0.1));
        assert!((r.reward - (-0.081)).abs() < 1e-12);
        assert!(!r.done);
    }

    #[test]
    fn step_at_goal_with_zero_action() {
        let t = goal_task(Point2::new(0.3, 0.3));
        let r = step(&t, Point2::new(0.3, 0.3), Point2::new(0.0, 0.0)).unwrap();
        assert_eq!(r.reward, 0.0);
        assert!(r.done);
    }

    #[test]
    fn obstacle_bounce_keeps_previous_position() {
        let t = TaskSpec {
            landscape: Landscape::Obstacle {
                center: Point2::new(0.0, 0.0),
            },
            start: Point2::new(0.0, -0.5),
            goal: Point2::new(0.0, 0.5),
            horizon: 100,
            goal_tolerance: 0.01,
            control_cost_coeff: 0.05,
        };
        let r = step(&t, Point2::new(0.0, -0.32), Point2::new(0.0, 0.05)).unwrap();
        assert_eq!(r.next_state, Point2::new(0.0, -0.32));
    }

    #[test]
    fn puddle_bounce_and_wall_clip() {
        let t = TaskSpec {
            landscape: Landscape::Puddles {
                puddles: [
                    Puddle { center: Point2::new(0.2, 0.0), radius: 0.08 },
                    Puddle { center: Point2::new(-0.2, 0.2), radius: 0.12 },
                    Puddle { center: Point2::new(0.0, -0.3), radius: 0.16 },
                ],
            },
            start: Point2::new(0.0, 0.0),
            goal: Point2::new(0.4, 0.4),
            horizon: 100,
            goal_tolerance: 0.01,
            control_cost_coeff: 0.05,
        };
        // Into the first puddle: bounce.
        let r = step(&t, Point2::new(0.13, 0.0), Point2::new(0.05, 0.0)).unwrap();
        assert_eq!(r.next_state, Point2::new(0.13, 0.0));
        // Through the wall: clipped to the boundary.
        let r = step(&t, Point2::new(0.48, 0.45), Point2::new(0.1, 0.0)).unwrap();
        assert_eq!(r.next_state, Point2::new(0.5, 0.45));
    }

    #[test]
    fn step_rejects_non_finite_action() {
        let t = goal_task(Point2::new(0.3, 0.3));
        assert!(step(&t, Point2::new(0.0, 0.0), Point2::new(f64::NAN, 0.0)).is_err());
    }

    #[test]
    fn zero_policy_rollout_closed_form() {
        let t = goal_task(Point2::new(0.3, 0.3));
        let arch = MlpArchitecture::new(2, vec![8], 2, 0.1).unwrap();
        let theta = ParameterVector::zeros(arch.param_count());
        let trace = rollout(&t, &arch, &theta).unwrap();
        assert_eq!(trace.len(), 100);
        assert!((trace.episode_return - (-18.0)).abs() < 1e-9);
        assert!(trace.states.iter().all(|&s| s == Point2::new(0.0, 0.0)));
    }

    #[test]
    fn rollout_trace_shape_and_determinism() {
        let t = sample_task::<f64>(TaskKind::GoalNav, 11, Rect::arena()).unwrap();
        let arch = MlpArchitecture::new(2, vec![16, 16], 2, 0.1).unwrap();
        let theta = init_random(&arch, 4);
        let a = rollout(&t, &arch, &theta).unwrap();
        let b = rollout(&t, &arch, &theta).unwrap();
        assert_eq!(a, b);
        assert!(a.len() <= 100);
        assert_eq!(a.actions.len(), a.rewards.len());
        assert_eq!(a.states.len(), a.rewards.len() + 1);
        let sum: f64 = a.rewards.iter().sum();
        assert_eq!(sum, a.episode_return);
        let arena = Rect::arena();
        assert!(a.states.iter().all(|&s| arena.contains(s)));
        assert!(a.rewards.iter().all(|&r| r <= 0.0));
    }

    #[test]
    fn early_termination_gives_short_trace() {
        // Goal adjacent to start: one step reaches it.
        let t = goal_task(Point2::new(0.05, 0.0));
        let arch = MlpArchitecture::new(2, vec![], 2, 0.1).unwrap();
        // Constant action (0.05, 0) via biases; zero weights.
        let theta = ParameterVector::new(vec![0.0, 0.0, 0.0, 0.0, 0.05, 0.0]).unwrap();
        let trace = rollout(&t, &arch, &theta).unwrap();
        assert_eq!(trace.len(), 1);
    }

    #[test]
    fn sampling_is_deterministic_and_respects_region() {
        let region = Rect::new(Point2::new(0.0, 0.0), Point2::new(0.5, 0.5)).unwrap();
        let a = sample_task::<f64>(TaskKind::GoalNav, 17, region).unwrap();
        let b = sample_task::<f64>(TaskKind::GoalNav, 17, region).unwrap();
        assert_eq!(a, b);
        assert!(a.goal.x >= 0.0 && a.goal.y >= 0.0);

        let c = sample_task::<f64>(TaskKind::GoalNav, 18, region).unwrap();
        assert_ne!(a.goal, c.goal);
    }

    #[test]
    fn sampled_obstacle_square_stays_in_arena() {
        for seed in 0..200 {
            let t = sample_task::<f64>(TaskKind::ObstacleNav, seed, Rect::arena()).unwrap();
            if let Landscape::Obstacle { center } = t.landscape {
                assert!(center.x.abs() <= 0.2 + 1e-12);
                assert!(center.y.abs() <= 0.2 + 1e-12);
            } else {
                panic!("expected obstacle landscape");
            }
        }
    }

    #[test]
    fn sampled_puddles_avoid_start_and_goal() {
        for seed in 0..200 {
            let t = sample_task::<f64>(TaskKind::PuddleNav, seed, Rect::arena()).unwrap();
            if let Landscape::Puddles { puddles } = &t.landscape {
                assert_eq!(puddles.len(), 3);
                for p in puddles {
                    assert!(!p.contains(t.start));
                    assert!(!p.contains(t.goal));
                }
            } else {
                panic!("expected puddle landscape");
            }
        }
    }

    #[test]
    fn task_record_round_trips() {
        for kind in [TaskKind::GoalNav, TaskKind::ObstacleNav, TaskKind::PuddleNav] {
            let t = sample_task::<f64>(kind, 23, Rect::arena()).unwrap();
            let line = t.to_string();
            let back: TaskSpec<f64> = line.parse().unwrap();
            assert_eq!(t, back);
        }
    }

    #[test]
    fn task_record_rejects_garbage() {
        assert!("".parse::<TaskSpec<f64>>().is_err());
        assert!("goal-nav start=0,0".parse::<TaskSpec<f64>>().is_err());
        assert!("bogus start=0,0 goal=0,0 horizon=100 tol=0.01 ccost=0.05"
            .parse::<TaskSpec<f64>>()
            .is_err());
    }
}
