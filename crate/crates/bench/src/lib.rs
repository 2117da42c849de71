//! Seeded trials, suites and CSV reports for the gridnav planners, plus the
//! pieces of the `gridnav` command line tool that are worth testing directly.

pub mod params;
pub mod render;
pub mod report;
pub mod suite;
pub mod trial;

use std::path::PathBuf;

use thiserror::Error;

pub use params::{Algo, AlgoParams};
pub use report::{emit_csv, parse_csv, CsvOptions, CSV_HEADER};
pub use suite::{aggregate, load_scenario_file, load_suite_dir, run_suite, wall_time_ratio, Aggregate, SuiteConfig};
pub use trial::{plan, run_trial, Plan, TrialResult};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("unknown algorithm `{0}` (expected shunting, consensus, apf, ga, aco or bso)")]
    UnknownAlgo(String),
    #[error("`{key}` is not a parameter of {algo}")]
    UnknownParam { algo: Algo, key: String },
    #[error("cannot parse `{value}` for `{key}`")]
    BadValue { key: String, value: String },
    #[error("malformed override `{0}`, expected key=value")]
    Malformed(String),
    #[error("invalid parameters: {0}")]
    Params(String),
    #[error("{}: {source}", path.display())]
    Scenario {
        path: PathBuf,
        source: gridnav_core::grid::ScenarioError,
    },
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("no .map files in {}", .0.display())]
    EmptySuite(PathBuf),
    #[error("malformed results CSV: {0}")]
    Csv(String),
}

impl BenchError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }
}
