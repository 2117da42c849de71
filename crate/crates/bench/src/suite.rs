use std::fs;
use std::path::Path as FsPath;

use gridnav_core::grid::{load_scenario, ScenarioConfig};
use rayon::prelude::*;

use crate::params::{Algo, AlgoParams};
use crate::trial::{run_trial, TrialResult};
use crate::BenchError;

pub fn load_scenario_file(path: &FsPath) -> Result<ScenarioConfig, BenchError> {
    let text = fs::read_to_string(path).map_err(|e| BenchError::io(path, e))?;
    load_scenario(&text).map_err(|source| BenchError::Scenario {
        path: path.to_path_buf(),
        source,
    })
}

/// Every `*.map` file in `dir`, named by file stem and sorted by name.
pub fn load_suite_dir(dir: &FsPath) -> Result<Vec<(String, ScenarioConfig)>, BenchError> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .map_err(|e| BenchError::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "map"))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(BenchError::EmptySuite(dir.to_path_buf()));
    }
    files
        .iter()
        .map(|p| {
            let name = p.file_stem().unwrap_or_default().to_string_lossy().into_owned();
            Ok((name, load_scenario_file(p)?))
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub planners: Vec<AlgoParams>,
    pub maps: Vec<(String, ScenarioConfig)>,
    pub trials: usize,
    /// Trial `i` uses seed `base_seed + i`.
    pub base_seed: u64,
    /// Worker threads; results do not depend on this.
    pub workers: usize,
}

/// Runs every planner on every map for every seed.
pub fn run_suite(cfg: &SuiteConfig) -> Result<Vec<TrialResult>, BenchError> {
    for p in &cfg.planners {
        p.validate()?;
    }
    let jobs: Vec<(&AlgoParams, &(String, ScenarioConfig), u64)> = cfg
        .planners
        .iter()
        .flat_map(|p| {
            cfg.maps
                .iter()
                .flat_map(move |m| (0..cfg.trials as u64).map(move |i| (p, m, cfg.base_seed + i)))
        })
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers.max(1))
        .build()
        .map_err(|e| BenchError::Params(format!("thread pool: {e}")))?;
    pool.install(|| {
        jobs.par_iter()
            .map(|(p, (name, sc), seed)| run_trial(p, name, sc, *seed).map(|(row, _)| row))
            .collect()
    })
}

/// Per `(algo, map)` summary.
#[derive(Debug, Clone, PartialEq)]
pub struct Aggregate {
    pub algo: Algo,
    pub map: String,
    pub trials: usize,
    pub success_rate: f64,
    /// Over successful trials only; NaN when there were none.
    pub mean_path_len: f64,
    pub median_path_len: f64,
    pub mean_iterations: f64,
    pub mean_wall_ms: f64,
}

fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        f64::NAN
    } else {
        xs.iter().sum::<f64>() / xs.len() as f64
    }
}

fn median(xs: &mut [f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.sort_by(f64::total_cmp);
    let m = xs.len() / 2;
    if xs.len() % 2 == 1 {
        xs[m]
    } else {
        (xs[m - 1] + xs[m]) / 2.0
    }
}

pub fn aggregate(rows: &[TrialResult]) -> Vec<Aggregate> {
    let mut keys: Vec<(Algo, String)> = rows.iter().map(|r| (r.algo, r.map.clone())).collect();
    keys.sort_by(|a, b| (a.0.name(), &a.1).cmp(&(b.0.name(), &b.1)));
    keys.dedup();
    keys.into_iter()
        .map(|(algo, map)| {
            let group: Vec<&TrialResult> = rows.iter().filter(|r| r.algo == algo && r.map == map).collect();
            let mut lens: Vec<f64> = group.iter().filter(|r| r.success).map(|r| r.path_len).collect();
            let n = group.len();
            Aggregate {
                algo,
                trials: n,
                success_rate: lens.len() as f64 / n as f64,
                mean_path_len: mean(&lens),
                median_path_len: median(&mut lens),
                mean_iterations: mean(&group.iter().map(|r| r.iterations_to_best as f64).collect::<Vec<_>>()),
                mean_wall_ms: mean(&group.iter().map(|r| r.wall_ms).collect::<Vec<_>>()),
                map,
            }
        })
        .collect()
}

/// Mean wall time of `a` divided by that of `b`, over all of their trials.
pub fn wall_time_ratio(rows: &[TrialResult], a: Algo, b: Algo) -> Option<f64> {
    let of = |x: Algo| mean(&rows.iter().filter(|r| r.algo == x).map(|r| r.wall_ms).collect::<Vec<_>>());
    let (ma, mb) = (of(a), of(b));
    (ma.is_finite() && mb.is_finite() && mb > 0.0).then(|| ma / mb)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aggregates_ignore_failures_for_lengths() {
        let mk = |seed, len: f64, ms| TrialResult {
            algo: Algo::Ga,
            map: "m".into(),
            seed,
            success: len.is_finite(),
            path_len: len,
            iterations_to_best: seed as usize,
            wall_ms: ms,
            collisions: 0,
        };
        let rows = vec![mk(0, 4.0, 1.0), mk(1, f64::INFINITY, 3.0), mk(2, 6.0, 2.0), mk(3, 10.0, 2.0)];
        let agg = aggregate(&rows);
        assert_eq!(agg.len(), 1);
        let a = &agg[0];
        assert_eq!(a.success_rate, 0.75);
        assert_eq!(a.mean_path_len, 20.0 / 3.0);
        assert_eq!(a.median_path_len, 6.0);
        assert_eq!(a.mean_iterations, 1.5);
        assert_eq!(a.mean_wall_ms, 2.0);
        assert_eq!(wall_time_ratio(&rows, Algo::Ga, Algo::Ga), Some(1.0));
        assert_eq!(wall_time_ratio(&rows, Algo::Ga, Algo::Aco), None);
    }
}
