use std::fmt;

use super::{
    attractive_force, collision_check, repulsive_force, ApfError, ApfParams, Clearance, Disc, ObstacleSet,
    RobotState, TargetState, Vec2,
};
use crate::grid::{ScenarioConfig, TrackSample};
use crate::numfmt::sig6;
use crate::Scalar;

pub const TRAJECTORY_HEADER: &str = "t,x,y,vx,vy,fx,fy,min_clearance,event";

/// How the goal moves over time.
#[derive(Debug, Clone, PartialEq)]
pub enum TargetMotion<T> {
    Static(Vec2<T>),
    /// `p(t) = origin + velocity t + accel t² / 2`
    Kinematic {
        origin: Vec2<T>,
        velocity: Vec2<T>,
        accel: Vec2<T>,
    },
    /// Piecewise-linear interpolation of samples; held at the ends.
    Track(Vec<TrackSample<T>>),
}

impl<T: Scalar> TargetMotion<T> {
    pub fn is_static(&self) -> bool {
        matches!(self, TargetMotion::Static(_))
    }

    fn track_pos_vel(samples: &[TrackSample<T>], t: T) -> (Vec2<T>, Vec2<T>) {
        let p = |s: &TrackSample<T>| Vec2::new(s.x, s.y);
        let first = &samples[0];
        let last = &samples[samples.len() - 1];
        if t <= first.t {
            return (p(first), Vec2::zero());
        }
        if t >= last.t {
            return (p(last), Vec2::zero());
        }
        let seg = samples.windows(2).find(|w| t < w[1].t).expect("t inside the track");
        let (a, b) = (&seg[0], &seg[1]);
        let span = b.t - a.t;
        let vel = (p(b) - p(a)) * (T::one() / span);
        (p(a) + vel * (t - a.t), vel)
    }

    /// Position, velocity and acceleration at `t`. Track acceleration is the
    /// backward difference of the segment velocity over `dt`.
    pub fn state_at(&self, t: T, dt: T) -> TargetState<T> {
        match self {
            TargetMotion::Static(pos) => TargetState {
                pos: *pos,
                ..Default::default()
            },
            TargetMotion::Kinematic { origin, velocity, accel } => TargetState {
                pos: *origin + *velocity * t + *accel * (T::lit(0.5) * t * t),
                vel: *velocity + *accel * t,
                acc: *accel,
            },
            TargetMotion::Track(samples) => {
                let (pos, vel) = Self::track_pos_vel(samples, t);
                let (_, prev) = Self::track_pos_vel(samples, t - dt);
                TargetState {
                    pos,
                    vel,
                    acc: (vel - prev) * (T::one() / dt),
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContinuousScenario<T> {
    pub start: Vec2<T>,
    pub target: TargetMotion<T>,
    pub obstacles: ObstacleSet<T>,
    /// Stop as soon as the arrival test passes. Tracking experiments turn
    /// this off to observe steady-state error.
    pub stop_on_arrival: bool,
}

impl<T: Scalar> ContinuousScenario<T> {
    /// Cell centers at `(x, y) = (col, row)`; each obstacle cell becomes a
    /// disc of radius 0.5; the target follows the scenario track if any.
    pub fn from_grid(scenario: &ScenarioConfig<T>) -> Self {
        let map = &scenario.map;
        let center = |c: crate::Coord| Vec2::new(T::from_count(c.col), T::from_count(c.row));
        let discs = map
            .coords()
            .filter(|&c| map.is_obstacle(c))
            .map(|c| Disc::fixed(center(c), T::lit(0.5)))
            .collect();
        let target = match &scenario.track {
            Some(track) => TargetMotion::Track(track.clone()),
            None => TargetMotion::Static(center(map.target())),
        };
        Self {
            start: center(map.start()),
            target,
            obstacles: ObstacleSet::new(discs),
            stop_on_arrival: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Event {
    Move,
    Emergency,
    Penetration,
    Arrived,
    Timeout,
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Event::Move => "move",
            Event::Emergency => "emergency",
            Event::Penetration => "penetration",
            Event::Arrived => "arrived",
            Event::Timeout => "timeout",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryRow<T> {
    pub t: T,
    pub pos: Vec2<T>,
    pub vel: Vec2<T>,
    pub force: Vec2<T>,
    pub min_clearance: T,
    /// Distance to the target at the start of this step.
    pub goal_error: T,
    pub event: Event,
}

impl<T: Scalar> TrajectoryRow<T> {
    pub fn to_csv_row(&self) -> String {
        let f = |v: T| sig6(v.to_f64_lossy());
        format!(
            "{},{},{},{},{},{},{},{},{}",
            f(self.t),
            f(self.pos.x),
            f(self.pos.y),
            f(self.vel.x),
            f(self.vel.y),
            f(self.force.x),
            f(self.force.y),
            f(self.min_clearance),
            self.event
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimOutcome<T> {
    pub success: bool,
    /// Steps integrated (arrival at step `k` reports `k`).
    pub steps: usize,
    pub path_len: T,
    /// Emergency and penetration events.
    pub collisions: usize,
    pub trajectory: Vec<TrajectoryRow<T>>,
    pub final_state: RobotState<T>,
}

impl<T: Scalar> SimOutcome<T> {
    pub fn trajectory_csv(&self) -> String {
        let mut out = String::from(TRAJECTORY_HEADER);
        out.push('\n');
        for row in &self.trajectory {
            out.push_str(&row.to_csv_row());
            out.push('\n');
        }
        out
    }

    /// Mean distance to the target over the last `fraction` of the steps.
    pub fn tail_error(&self, fraction: f64) -> T {
        let n = self.trajectory.len();
        let take = ((n as f64 * fraction).ceil() as usize).clamp(1, n.max(1));
        let tail = &self.trajectory[n.saturating_sub(take)..];
        tail.iter().fold(T::zero(), |a, r| a + r.goal_error) / T::from_count(tail.len().max(1))
    }
}

/// Fixed-step closed loop with unit mass:
///
/// 1. arrival test: `|X - X_g| < goal_eps`, plus `|V - V_g| < goal_eps` for a
///    moving target;
/// 2. `a = F_att + F_rep`, `V += a dt`;
/// 3. emergency when some disc is closer than `d_safe`: the velocity
///    component toward that disc is removed and a unit lateral impulse,
///    rotated counter-clockwise from the disc direction, is added;
/// 4. `V` is clamped to `v_max` and `X += V dt`.
pub fn simulate<T: Scalar>(scenario: &ContinuousScenario<T>, p: &ApfParams<T>) -> Result<SimOutcome<T>, ApfError> {
    p.validate()?;
    let mut robot = RobotState {
        pos: scenario.start,
        ..Default::default()
    };
    let mut trajectory = Vec::new();
    let mut path_len = T::zero();
    let mut collisions = 0;
    let mut success = false;
    let mut arrived_at = None;
    let moving = !scenario.target.is_static();

    for k in 0..=p.max_steps {
        let t = T::from_count(k) * p.dt;
        let target = scenario.target.state_at(t, p.dt);
        let obstacles = scenario.obstacles.at(t);
        let min_clearance = obstacles.nearest(robot.pos).map_or(T::infinity(), |(_, c)| c);
        let goal_error = (robot.pos - target.pos).norm();
        let arrived = goal_error < p.goal_eps && (!moving || (robot.vel - target.vel).norm() < p.goal_eps);
        if arrived && !success {
            success = true;
            arrived_at = Some(k);
        }
        if (arrived && scenario.stop_on_arrival) || k == p.max_steps {
            trajectory.push(TrajectoryRow {
                t,
                pos: robot.pos,
                vel: robot.vel,
                force: Vec2::zero(),
                min_clearance,
                goal_error,
                event: if arrived { Event::Arrived } else { Event::Timeout },
            });
            break;
        }

        let attract = attractive_force(&robot, &target, p);
        let (repel, mut event) = match repulsive_force(&robot, &target, &obstacles, p) {
            Ok(f) => (f, Event::Move),
            Err(ApfError::Penetration { .. }) => (Vec2::zero(), Event::Penetration),
            Err(e) => return Err(e),
        };
        let force = attract + repel;
        robot.acc = force;
        let mut vel = robot.vel + force * p.dt;

        if event == Event::Penetration || collision_check(&robot, &obstacles, p.d_safe) == Clearance::Emergency {
            if event == Event::Move {
                event = Event::Emergency;
            }
            collisions += 1;
            if let Some((i, _)) = obstacles.nearest(robot.pos) {
                if let Some(toward) = (obstacles.discs[i].center - robot.pos).normalized() {
                    let approach = vel.dot(toward);
                    if approach > T::zero() {
                        vel -= toward * approach;
                    }
                    vel += toward.perp_ccw();
                }
            }
        }

        robot.vel = vel.clamp_norm(p.v_max);
        let step = robot.vel * p.dt;
        robot.pos += step;
        path_len += step.norm();
        trajectory.push(TrajectoryRow {
            t,
            pos: robot.pos,
            vel: robot.vel,
            force,
            min_clearance,
            goal_error,
            event,
        });
    }

    Ok(SimOutcome {
        success,
        steps: arrived_at.filter(|_| scenario.stop_on_arrival).unwrap_or(trajectory.len().saturating_sub(1)),
        path_len,
        collisions,
        trajectory,
        final_state: robot,
    })
}
