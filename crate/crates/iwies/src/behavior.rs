//! Behavior characterizations and the distances that feed instance novelty.
//!
//! A characterization is a fixed-length trajectory descriptor: for 2D
//! navigation the trace of visited positions, for 1D-progress domains the
//! trace of coordinate offsets from the starting point. Episodes that end
//! before the horizon are padded with their final entry so distances stay
//! well-defined across unequal episode lengths.

use crate::env::{EpisodeTrace, Point2};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Fixed-length trajectory descriptor of a policy's behavior.
#[derive(Debug, Clone, PartialEq)]
pub enum BehaviorCharacterization<T> {
    /// The agent's 2D position after each time step.
    PointTrace(Vec<Point2<T>>),
    /// The agent's 1D coordinate offset from its starting point per time step.
    OffsetTrace(Vec<T>),
}

impl<T: Scalar> BehaviorCharacterization<T> {
    pub fn len(&self) -> usize {
        match self {
            BehaviorCharacterization::PointTrace(v) => v.len(),
            BehaviorCharacterization::OffsetTrace(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn kind(&self) -> &'static str {
        match self {
            BehaviorCharacterization::PointTrace(_) => "point-trace",
            BehaviorCharacterization::OffsetTrace(_) => "offset-trace",
        }
    }
}

/// Characterize a navigation rollout: the `horizon` post-step positions,
/// padded with the final position when the episode ended early.
pub fn bc_nav<T: Scalar>(
    trace: &EpisodeTrace<T>,
    horizon: usize,
) -> Result<BehaviorCharacterization<T>> {
    if trace.states.is_empty() {
        return Err(Error::InvalidArgument("empty episode trace".into()));
    }
    // states[0] is the start; post-step positions follow. A zero-step episode
    // (start already at the goal) pads with the start itself.
    let visited = &trace.states[1..];
    let last = *trace.states.last().expect("non-empty");
    let mut points = Vec::with_capacity(horizon);
    points.extend_from_slice(&visited[..visited.len().min(horizon)]);
    while points.len() < horizon {
        points.push(last);
    }
    Ok(BehaviorCharacterization::PointTrace(points))
}

/// Characterize 1D progress: offsets `x_i - x_0`, padded with the final offset.
pub fn bc_offsets<T: Scalar>(
    x_positions: &[T],
    horizon: usize,
) -> Result<BehaviorCharacterization<T>> {
    let (&origin, rest) = x_positions
        .split_first()
        .ok_or_else(|| Error::InvalidArgument("empty position list".into()))?;
    let mut offsets: Vec<T> = rest.iter().map(|&x| x - origin).collect();
    let last = offsets.last().copied().unwrap_or(T::zero());
    offsets.truncate(horizon);
    while offsets.len() < horizon {
        offsets.push(last);
    }
    Ok(BehaviorCharacterization::OffsetTrace(offsets))
}

/// Average Euclidean distance between two position traces of equal length.
pub fn distance_nav<T: Scalar>(a: &[Point2<T>], b: &[Point2<T>]) -> Result<T> {
    if a.len() != b.len() {
        return Err(Error::ShapeMismatch {
            context: "point-trace distance",
            expected: a.len(),
            actual: b.len(),
        });
    }
    if a.is_empty() {
        return Err(Error::InvalidArgument("empty characterization".into()));
    }
    let sum: T = a.iter().zip(b.iter()).map(|(&p, &q)| p.distance(q)).sum();
    Ok(sum / T::from_count(a.len()))
}

/// Average absolute distance between two offset traces of equal length.
pub fn distance_offsets<T: Scalar>(a: &[T], b: &[T]) -> Result<T> {
    if a.len() != b.len() {
        return Err(Error::ShapeMismatch {
            context: "offset-trace distance",
            expected: a.len(),
            actual: b.len(),
        });
    }
    if a.is_empty() {
        return Err(Error::InvalidArgument("empty characterization".into()));
    }
    let sum: T = a.iter().zip(b.iter()).map(|(&x, &y)| (x - y).abs()).sum();
    Ok(sum / T::from_count(a.len()))
}

/// Distance between two characterizations of the same kind and length.
pub fn distance<T: Scalar>(
    a: &BehaviorCharacterization<T>,
    b: &BehaviorCharacterization<T>,
) -> Result<T> {
    match (a, b) {
        (BehaviorCharacterization::PointTrace(x), BehaviorCharacterization::PointTrace(y)) => {
            distance_nav(x, y)
        }
        (BehaviorCharacterization::OffsetTrace(x), BehaviorCharacterization::OffsetTrace(y)) => {
            distance_offsets(x, y)
        }
        _ => Err(Error::BehaviorMismatch(format!(
            "{} vs {}",
            a.kind(),
            b.kind()
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pts(coords: &[(f64, f64)]) -> Vec<Point2<f64>> {
        coords.iter().map(|&(x, y)| Point2::new(x, y)).collect()
    }

    #[test]
    fn nav_distance_hand_example() {
        let a = pts(&[(0.0, 0.0), (0.3, 0.4)]);
        let b = pts(&[(0.0, 0.0), (0.0, 0.0)]);
        let d = distance_nav(&a, &b).unwrap();
        assert!((d - 0.25).abs() < 1e-15);
        assert_eq!(distance_nav(&a, &a).unwrap(), 0.0);
        assert_eq!(
            distance_nav(&a, &b).unwrap(),
            distance_nav(&b, &a).unwrap()
        );
    }

    #[test]
    fn offset_distance_hand_example() {
        let d = distance_offsets(&[0.0f64, 1.0], &[1.0, 3.0]).unwrap();
        assert!((d - 1.5).abs() < 1e-15);
        assert_eq!(distance_offsets(&[2.0f64, 2.0], &[2.0, 2.0]).unwrap(), 0.0);
    }

    #[test]
    fn distances_reject_length_mismatch() {
        assert!(distance_nav(&pts(&[(0.0, 0.0)]), &pts(&[])).is_err());
        assert!(distance_offsets(&[1.0f64], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn dispatch_rejects_kind_mismatch() {
        let a = BehaviorCharacterization::PointTrace(pts(&[(0.0, 0.0)]));
        let b = BehaviorCharacterization::OffsetTrace(vec![0.0]);
        assert!(matches!(distance(&a, &b), Err(Error::BehaviorMismatch(_))));
    }

    #[test]
    fn bc_offsets_examples() {
        let bc = bc_offsets(&[1.0, 1.0, 1.0], 2).unwrap();
        assert_eq!(bc, BehaviorCharacterization::OffsetTrace(vec![0.0, 0.0]));

        let bc = bc_offsets(&[0.0, 0.5, 1.5], 2).unwrap();
        assert_eq!(bc, BehaviorCharacterization::OffsetTrace(vec![0.5, 1.5]));

        let bc = bc_offsets(&[2.0, 3.0], 3).unwrap();
        assert_eq!(
            bc,
            BehaviorCharacterization::OffsetTrace(vec![1.0, 1.0, 1.0])
        );

        assert!(bc_offsets::<f64>(&[], 3).is_err());
    }

    #[test]
    fn bc_nav_pads_with_final_position() {
        let trace = EpisodeTrace {
            states: pts(&[(0.0, 0.0), (0.1, 0.0), (0.2, 0.0), (0.3, 0.0)]),
            actions: pts(&[(0.1, 0.0), (0.1, 0.0), (0.1, 0.0)]),
            rewards: vec![-1.0, -1.0, -1.0],
            episode_return: -3.0,
        };
        let bc = bc_nav(&trace, 5).unwrap();
        assert_eq!(
            bc,
            BehaviorCharacterization::PointTrace(pts(&[
                (0.1, 0.0),
                (0.2, 0.0),
                (0.3, 0.0),
                (0.3, 0.0),
                (0.3, 0.0)
            ]))
        );
    }

    #[test]
    fn bc_nav_stationary_episode_is_start_repeated() {
        let trace = EpisodeTrace {
            states: pts(&[(0.0, 0.0), (0.0, 0.0), (0.0, 0.0)]),
            actions: pts(&[(0.0, 0.0), (0.0, 0.0)]),
            rewards: vec![-1.0, -1.0],
            episode_return: -2.0,
        };
        let bc = bc_nav(&trace, 4).unwrap();
        assert_eq!(
            bc,
            BehaviorCharacterization::PointTrace(pts(&[(0.0, 0.0); 4]))
        );
    }

    #[test]
    fn works_in_f32() {
        let d = distance_offsets(&[0.0f32, 1.0], &[1.0, 3.0]).unwrap();
        assert!((d - 1.5).abs() < 1e-6);
    }

    proptest! {
        #[test]
        fn nav_distance_is_a_pseudometric(
            raw in proptest::collection::vec((-0.5f64..0.5, -0.5f64..0.5), 3 * 4..3 * 16 + 1)
        ) {
            prop_assume!(raw.len() % 3 == 0);
            let n = raw.len() / 3;
            let a = pts(&raw[..n]);
            let b = pts(&raw[n..2 * n]);
            let c = pts(&raw[2 * n..]);
            let dab = distance_nav(&a, &b).unwrap();
            let dba = distance_nav(&b, &a).unwrap();
            let dac = distance_nav(&a, &c).unwrap();
            let dcb = distance_nav(&c, &b).unwrap();
            prop_assert!(dab >= 0.0);
            prop_assert_eq!(dab, dba);
            prop_assert!(dab <= dac + dcb + 1e-12);
        }

        #[test]
        fn offset_distance_is_a_pseudometric(
            raw in proptest::collection::vec(-10.0f64..10.0, 3 * 2..3 * 20 + 1)
        ) {
            prop_assume!(raw.len() % 3 == 0);
            let n = raw.len() / 3;
            let (a, rest) = raw.split_at(n);
            let (b, c) = rest.split_at(n);
            let dab = distance_offsets(a, b).unwrap();
            let dba = distance_offsets(b, a).unwrap();
            let dac = distance_offsets(a, c).unwrap();
            let dcb = distance_offsets(c, b).unwrap();
            prop_assert!(dab >= 0.0);
            prop_assert_eq!(dab, dba);
            prop_assert!(dab <= dac + dcb + 1e-12);
        }
    }
}
