//! Artificial potential field planner for a point robot in the plane.
//!
//! The attractive force pulls on relative position, velocity and
//! acceleration:
//!
//! ```text
//! F_att = alpha (X_g - X) + beta (V_g - V) + lambda (a_g - a)
//! ```
//!
//! so it vanishes only when the robot matches the target's full motion
//! state, which lets it track a moving goal. Repulsion is the classic
//! inverse-clearance field scaled by the distance to the goal, which removes
//! the goal-unreachable case when an obstacle sits next to the target.

mod sim;
mod vec2;

pub use sim::{simulate, ContinuousScenario, Event, SimOutcome, TargetMotion, TrajectoryRow, TRAJECTORY_HEADER};
pub use vec2::Vec2;

use thiserror::Error;

use crate::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RobotState<T> {
    pub pos: Vec2<T>,
    pub vel: Vec2<T>,
    pub acc: Vec2<T>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TargetState<T> {
    pub pos: Vec2<T>,
    pub vel: Vec2<T>,
    pub acc: Vec2<T>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApfParams<T> {
    pub alpha: T,
    pub beta: T,
    pub lambda: T,
    /// Repulsion gain.
    pub eta: T,
    /// Repulsion influence range (clearance).
    pub rho0: T,
    /// Clearance below which the robot takes emergency action.
    pub d_safe: T,
    pub dt: T,
    pub v_max: T,
    pub goal_eps: T,
    pub max_steps: usize,
}

impl<T: Scalar> Default for ApfParams<T> {
    fn default() -> Self {
        Self {
            alpha: T::one(),
            beta: T::lit(2.0),
            lambda: T::lit(0.1),
            eta: T::lit(0.5),
            rho0: T::lit(1.5),
            d_safe: T::lit(0.2),
            dt: T::lit(0.05),
            v_max: T::lit(2.0),
            goal_eps: T::lit(0.05),
            max_steps: 5000,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ApfError {
    #[error("parameter `{0}` out of range")]
    Param(&'static str),
    #[error("robot is inside obstacle {index} (clearance {clearance})")]
    Penetration { index: usize, clearance: f64 },
}

impl<T: Scalar> ApfParams<T> {
    pub fn validate(&self) -> Result<(), ApfError> {
        let nonneg = [("alpha", self.alpha), ("beta", self.beta), ("lambda", self.lambda), ("eta", self.eta)];
        for (name, v) in nonneg {
            if !(v >= T::zero()) || !v.is_finite() {
                return Err(ApfError::Param(name));
            }
        }
        let pos = [
            ("rho0", self.rho0),
            ("d_safe", self.d_safe),
            ("dt", self.dt),
            ("v_max", self.v_max),
            ("goal_eps", self.goal_eps),
        ];
        for (name, v) in pos {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(ApfError::Param(name));
            }
        }
        if self.d_safe >= self.rho0 {
            return Err(ApfError::Param("d_safe"));
        }
        if self.max_steps == 0 {
            return Err(ApfError::Param("max_steps"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Disc<T> {
    pub center: Vec2<T>,
    pub radius: T,
    pub velocity: Vec2<T>,
}

impl<T: Scalar> Disc<T> {
    pub fn fixed(center: Vec2<T>, radius: T) -> Self {
        Self {
            center,
            radius,
            velocity: Vec2::zero(),
        }
    }

    /// Signed distance from `p` to the disc boundary.
    pub fn clearance(&self, p: Vec2<T>) -> T {
        (p - self.center).norm() - self.radius
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ObstacleSet<T> {
    pub discs: Vec<Disc<T>>,
}

impl<T: Scalar> ObstacleSet<T> {
    pub fn new(discs: Vec<Disc<T>>) -> Self {
        Self { discs }
    }

    /// Obstacles advanced along their velocities to time `t`.
    pub fn at(&self, t: T) -> Self {
        Self {
            discs: self
                .discs
                .iter()
                .map(|d| Disc {
                    center: d.center + d.velocity * t,
                    ..*d
                })
                .collect(),
        }
    }

    /// Index and clearance of the closest disc.
    pub fn nearest(&self, p: Vec2<T>) -> Option<(usize, T)> {
        self.discs
            .iter()
            .map(|d| d.clearance(p))
            .enumerate()
            .fold(None, |best, (i, c)| match best {
                Some((_, bc)) if bc <= c => best,
                _ => Some((i, c)),
            })
    }
}

pub fn attractive_force<T: Scalar>(r: &RobotState<T>, t: &TargetState<T>, p: &ApfParams<T>) -> Vec2<T> {
    (t.pos - r.pos) * p.alpha + (t.vel - r.vel) * p.beta + (t.acc - r.acc) * p.lambda
}

/// Sum over discs with clearance `rho < rho0` of
/// `eta (1/rho - 1/rho0) / rho² * |X - X_g| * n`, `n` pointing away from the disc.
pub fn repulsive_force<T: Scalar>(
    r: &RobotState<T>,
    t: &TargetState<T>,
    obs: &ObstacleSet<T>,
    p: &ApfParams<T>,
) -> Result<Vec2<T>, ApfError> {
    let goal_dist = (r.pos - t.pos).norm();
    let mut total = Vec2::zero();
    for (index, d) in obs.discs.iter().enumerate() {
        let rho = d.clearance(r.pos);
        if rho <= T::zero() {
            return Err(ApfError::Penetration {
                index,
                clearance: rho.to_f64_lossy(),
            });
        }
        if rho >= p.rho0 {
            continue;
        }
        let Some(away) = (r.pos - d.center).normalized() else {
            continue;
        };
        let mag = p.eta * (T::one() / rho - T::one() / p.rho0) / (rho * rho) * goal_dist;
        total += away * mag;
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Clearance {
    Clear,
    Emergency,
}

/// Emergency when the nearest disc is strictly closer than `d_safe`.
pub fn collision_check<T: Scalar>(r: &RobotState<T>, obs: &ObstacleSet<T>, d_safe: T) -> Clearance {
    match obs.nearest(r.pos) {
        Some((_, c)) if c < d_safe => Clearance::Emergency,
        _ => Clearance::Clear,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: f64, y: f64) -> Vec2<f64> {
        Vec2::new(x, y)
    }

    fn at(pos: Vec2<f64>) -> RobotState<f64> {
        RobotState {
            pos,
            ..Default::default()
        }
    }

    #[test]
    fn attraction_vanishes_at_matched_state() {
        let p = ApfParams::<f64>::default();
        let r = RobotState {
            pos: v(1.0, 2.0),
            vel: v(0.5, -0.5),
            acc: v(0.1, 0.0),
        };
        let t = TargetState {
            pos: r.pos,
            vel: r.vel,
            acc: r.acc,
        };
        assert_eq!(attractive_force(&r, &t, &p), Vec2::zero());
    }

    #[test]
    fn attraction_is_linear() {
        let p = ApfParams {
            alpha: 1.0,
            beta: 0.0,
            lambda: 0.0,
            ..Default::default()
        };
        let r = at(v(0.0, 0.0));
        let t = TargetState {
            pos: v(3.0, 4.0),
            ..Default::default()
        };
        let f = attractive_force(&r, &t, &p);
        assert_eq!(f, v(3.0, 4.0));
        assert_eq!(f.norm(), 5.0);

        let base = ApfParams { alpha: 0.7, beta: 1.3, lambda: 0.4, ..p };
        let doubled = ApfParams {
            alpha: 1.4,
            beta: 2.6,
            lambda: 0.8,
            ..p
        };
        let r = RobotState {
            pos: v(0.5, 1.0),
            vel: v(0.25, 0.0),
            acc: v(0.0, -0.5),
        };
        let t = TargetState {
            pos: v(2.0, -1.0),
            vel: v(1.0, 1.0),
            acc: v(0.5, 0.5),
        };
        assert_eq!(attractive_force(&r, &t, &doubled), attractive_force(&r, &t, &base) * 2.0);
    }

    #[test]
    fn repulsion_cases() {
        let p = ApfParams::<f64>::default();
        let goal = TargetState {
            pos: v(10.0, 0.0),
            ..Default::default()
        };
        let none = ObstacleSet::default();
        assert_eq!(repulsive_force(&at(v(0.0, 0.0)), &goal, &none, &p).unwrap(), Vec2::zero());

        // Clearance exactly rho0.
        let obs = ObstacleSet::new(vec![Disc::fixed(v(0.0, 2.0), 0.5)]);
        let edge = at(v(0.0, 2.0 - 0.5 - p.rho0));
        assert_eq!(repulsive_force(&edge, &goal, &obs, &p).unwrap(), Vec2::zero());

        // Inside the range: pushes away from the disc (negative y here).
        let near = at(v(0.0, 1.0));
        let f = repulsive_force(&near, &goal, &obs, &p).unwrap();
        assert!(f.y < 0.0 && f.x == 0.0);
        let rho: f64 = 0.5;
        let expected = p.eta * (1.0 / rho - 1.0 / p.rho0) / (rho * rho) * 10.0f64.hypot(1.0);
        assert!((f.norm() - expected).abs() < 1e-12);

        // Robot at the goal: goal factor is zero.
        let at_goal = TargetState {
            pos: near.pos,
            ..Default::default()
        };
        assert_eq!(repulsive_force(&near, &at_goal, &obs, &p).unwrap(), Vec2::zero());

        assert!(matches!(
            repulsive_force(&at(v(0.0, 2.2)), &goal, &obs, &p),
            Err(ApfError::Penetration { index: 0, .. })
        ));
    }

    #[test]
    fn safe_distance_rule() {
        let d_safe = 0.4;
        let none = ObstacleSet::<f64>::default();
        assert_eq!(collision_check(&at(v(0.0, 0.0)), &none, d_safe), Clearance::Clear);
        let obs = ObstacleSet::new(vec![Disc::fixed(v(0.0, 0.0), 1.0)]);
        assert_eq!(collision_check(&at(v(1.5, 0.0)), &obs, 0.5), Clearance::Clear);
        assert_eq!(collision_check(&at(v(1.0 + d_safe / 2.0, 0.0)), &obs, d_safe), Clearance::Emergency);
    }

    #[test]
    fn param_validation() {
        ApfParams::<f64>::default().validate().unwrap();
        let bad = ApfParams::<f64> { d_safe: 2.0, ..Default::default() };
        assert_eq!(bad.validate(), Err(ApfError::Param("d_safe")));
        let bad = ApfParams::<f64> { alpha: -1.0, ..Default::default() };
        assert_eq!(bad.validate(), Err(ApfError::Param("alpha")));
    }
}
