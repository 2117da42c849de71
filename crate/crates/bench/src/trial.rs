use std::time::Instant;

use gridnav_core::consensus::{backtrack, init_net, solve};
use gridnav_core::grid::{path_length, ScenarioConfig};
use gridnav_core::metaheuristics::{run_aco, run_bso, run_ga, trace_csv, Outcome, ParamError};
use gridnav_core::potential::{simulate, ContinuousScenario};
use gridnav_core::shunting::{extract_path, settle};
use gridnav_core::{Coord, Neighborhood, Path};

use crate::params::{Algo, AlgoParams};
use crate::BenchError;

/// One row of a results table.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub algo: Algo,
    pub map: String,
    pub seed: u64,
    pub success: bool,
    /// Infinite when the trial failed.
    pub path_len: f64,
    pub iterations_to_best: usize,
    pub wall_ms: f64,
    pub collisions: usize,
}

/// Everything a planner produced, beyond the summary row.
#[derive(Debug, Clone, PartialEq)]
pub struct Plan {
    pub success: bool,
    pub path: Option<Path>,
    pub path_len: f64,
    pub iterations_to_best: usize,
    pub collisions: usize,
    /// Per-iteration trace or trajectory CSV, where the planner keeps one.
    pub trace: Option<String>,
    /// Tabulated distance or activity field, for field-based planners.
    pub field: Option<String>,
}

fn params_err(e: ParamError) -> BenchError {
    BenchError::Params(e.to_string())
}

fn from_outcome(out: Outcome<f64>) -> Plan {
    Plan {
        success: out.success(),
        path: out.grid_path(),
        path_len: out.cost,
        iterations_to_best: out.iterations_to_best,
        collisions: 0,
        trace: Some(trace_csv(&out.trace)),
        field: None,
    }
}

/// Runs one planner on one scenario. `seed` only matters for the stochastic
/// optimizers.
pub fn plan(params: &AlgoParams, scenario: &ScenarioConfig, seed: u64) -> Result<Plan, BenchError> {
    params.validate()?;
    let map = &scenario.map;
    let plan = match params {
        AlgoParams::Shunting(p) => {
            let settled = settle(map, p).map_err(|e| BenchError::Params(e.to_string()))?;
            let path = extract_path(&settled.field, map, map.start()).ok();
            let path_len = path
                .as_ref()
                .and_then(|p| path_length::<f64>(p, Neighborhood::Eight).ok())
                .unwrap_or(f64::INFINITY);
            Plan {
                success: path.is_some(),
                path,
                path_len,
                iterations_to_best: settled.field.iteration(),
                collisions: 0,
                trace: None,
                field: Some(settled.field.to_table()),
            }
        }
        AlgoParams::Consensus { max_sweeps } => {
            let nb = scenario.neighborhood;
            let mut net = init_net::<f64>(map, nb);
            let sol = solve(&mut net, max_sweeps.unwrap_or(map.len() + 1));
            let path = backtrack(&sol.field, map, nb, map.start()).ok();
            Plan {
                success: path.is_some(),
                path_len: if path.is_some() { sol.field.get(map.start()) } else { f64::INFINITY },
                path,
                iterations_to_best: sol.sweeps,
                collisions: 0,
                trace: None,
                field: Some(sol.field.to_table(map)),
            }
        }
        AlgoParams::Apf(p) => {
            let cs = ContinuousScenario::from_grid(scenario);
            let out = simulate(&cs, p).map_err(|e| BenchError::Params(e.to_string()))?;
            let mut cells: Vec<Coord> = vec![map.start()];
            for row in &out.trajectory {
                let (r, c) = (row.pos.y.round(), row.pos.x.round());
                if r >= 0.0 && c >= 0.0 && (r as usize) < map.rows() && (c as usize) < map.cols() {
                    cells.push(Coord::new(r as usize, c as usize));
                }
            }
            cells.dedup();
            Plan {
                success: out.success,
                path: Some(Path::new(cells)),
                path_len: if out.success { out.path_len } else { f64::INFINITY },
                iterations_to_best: out.steps,
                collisions: out.collisions,
                trace: Some(out.trajectory_csv()),
                field: None,
            }
        }
        AlgoParams::Ga(p) => from_outcome(run_ga(map, p, seed).map_err(params_err)?),
        AlgoParams::Aco(p) => from_outcome(run_aco(map, p, seed).map_err(params_err)?),
        AlgoParams::Bso(p) => from_outcome(run_bso(map, p, seed).map_err(params_err)?),
    };
    Ok(plan)
}

/// Times [`plan`] and summarises it as a results row.
pub fn run_trial(
    params: &AlgoParams,
    map_name: &str,
    scenario: &ScenarioConfig,
    seed: u64,
) -> Result<(TrialResult, Plan), BenchError> {
    let started = Instant::now();
    let plan = plan(params, scenario, seed)?;
    let wall_ms = started.elapsed().as_secs_f64() * 1e3;
    let result = TrialResult {
        algo: params.algo(),
        map: map_name.to_string(),
        seed,
        success: plan.success,
        path_len: if plan.success { plan.path_len } else { f64::INFINITY },
        iterations_to_best: plan.iterations_to_best,
        wall_ms,
        collisions: plan.collisions,
    };
    Ok((result, plan))
}
