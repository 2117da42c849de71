//! Stochastic waypoint optimizers: a genetic algorithm, an elitist ant
//! colony, and a beetle swarm.

mod aco;
mod bso;
mod fitness;
mod ga;
mod seeding;

use std::fmt::Write as _;

pub use aco::{construct_tour, edge_index, prune_detours, run_aco, AcoParams, Pheromone};
pub use bso::{
    antennae_step, chemotaxis_direction, decode_position, random_direction, run_bso, Beetle, BsoParams, Heading,
    SwarmStats,
};
pub use fitness::{
    crossover, crossover_segment, evaluate_waypoints, fitness, fitness_value, mutate_bits, polyline_clear, select,
    survivors, Chromosome, Evaluation, FitnessError, FitnessParams, Genes, OperatorError, INFEASIBLE_PENALTY,
};
pub use ga::{mutate, run_ga, GaParams};
pub use seeding::{clear_waypoints, line_of_sight_chain, remove_loops, sample_interior, shortest_cells, Stitcher};

use crate::grid::{polyline_cells, Coord, Path};
use crate::numfmt::sig6;
use crate::Scalar;

pub const TRACE_HEADER: &str = "iter,best_cost,mean_cost,evaluations";

/// Progress after one generation or iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow<T> {
    pub iter: usize,
    /// Length of the best feasible path found so far, infinite if none.
    pub best_cost: T,
    pub mean_cost: T,
    pub evaluations: usize,
}

pub fn trace_csv<T: Scalar>(rows: &[TraceRow<T>]) -> String {
    let mut out = String::from(TRACE_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(out, "{},{},{},{}", r.iter, sig6(r.best_cost.to_f64_lossy()), sig6(r.mean_cost.to_f64_lossy()), r.evaluations);
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome<T> {
    /// Best feasible waypoint sequence, start first.
    pub waypoints: Option<Vec<Coord>>,
    pub cost: T,
    /// Iteration (1-based) at which the reported solution was first found.
    pub iterations_to_best: usize,
    pub evaluations: usize,
    pub trace: Vec<TraceRow<T>>,
}

impl<T: Scalar> Outcome<T> {
    pub fn success(&self) -> bool {
        self.waypoints.is_some()
    }

    /// The solution rasterised to an 8-connected cell path.
    pub fn grid_path(&self) -> Option<Path> {
        self.waypoints.as_ref().map(|w| Path::new(polyline_cells(w)))
    }
}

fn mean<T: Scalar>(xs: impl IntoIterator<Item = T>) -> T {
    let (mut sum, mut n) = (T::zero(), 0usize);
    for x in xs {
        sum += x;
        n += 1;
    }
    if n == 0 {
        T::nan()
    } else {
        sum / T::from_count(n)
    }
}

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
#[error("invalid {name}: {reason}")]
pub struct ParamError {
    pub name: &'static str,
    pub reason: &'static str,
}

pub(crate) fn check(ok: bool, name: &'static str, reason: &'static str) -> Result<(), ParamError> {
    if ok {
        Ok(())
    } else {
        Err(ParamError { name, reason })
    }
}

fn unit_interval<T: Scalar>(x: T) -> bool {
    x >= T::zero() && x <= T::one()
}

/// Result for a map whose target cannot be reached at all.
fn unreachable_outcome<T: Scalar>() -> Outcome<T> {
    Outcome {
        waypoints: None,
        cost: T::infinity(),
        iterations_to_best: 0,
        evaluations: 0,
        trace: Vec::new(),
    }
}
