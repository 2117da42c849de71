use std::fmt;
use std::str::FromStr;

use gridnav_core::metaheuristics::{AcoParams, BsoParams, GaParams};
use gridnav_core::potential::ApfParams;
use gridnav_core::shunting::ShuntingParams;

use crate::BenchError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Algo {
    Shunting,
    Consensus,
    Apf,
    Ga,
    Aco,
    Bso,
}

impl Algo {
    pub const ALL: [Algo; 6] = [Algo::Shunting, Algo::Consensus, Algo::Apf, Algo::Ga, Algo::Aco, Algo::Bso];

    pub fn name(self) -> &'static str {
        match self {
            Algo::Shunting => "shunting",
            Algo::Consensus => "consensus",
            Algo::Apf => "apf",
            Algo::Ga => "ga",
            Algo::Aco => "aco",
            Algo::Bso => "bso",
        }
    }
}

impl fmt::Display for Algo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algo {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Algo::ALL
            .into_iter()
            .find(|a| a.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| BenchError::UnknownAlgo(s.to_string()))
    }
}

/// Parameters for one planner.
#[derive(Debug, Clone, PartialEq)]
pub enum AlgoParams {
    Shunting(ShuntingParams<f64>),
    /// Sweep budget; `None` uses one sweep per cell plus one.
    Consensus { max_sweeps: Option<usize> },
    Apf(ApfParams<f64>),
    Ga(GaParams<f64>),
    Aco(AcoParams<f64>),
    Bso(BsoParams<f64>),
}

fn parse<V: FromStr>(key: &str, value: &str) -> Result<V, BenchError> {
    value.trim().parse().map_err(|_| BenchError::BadValue {
        key: key.to_string(),
        value: value.to_string(),
    })
}

impl AlgoParams {
    pub fn defaults(algo: Algo) -> Self {
        match algo {
            Algo::Shunting => AlgoParams::Shunting(ShuntingParams::default()),
            Algo::Consensus => AlgoParams::Consensus { max_sweeps: None },
            Algo::Apf => AlgoParams::Apf(ApfParams::default()),
            Algo::Ga => AlgoParams::Ga(GaParams::default()),
            Algo::Aco => AlgoParams::Aco(AcoParams::default()),
            Algo::Bso => AlgoParams::Bso(BsoParams::default()),
        }
    }

    pub fn algo(&self) -> Algo {
        match self {
            AlgoParams::Shunting(_) => Algo::Shunting,
            AlgoParams::Consensus { .. } => Algo::Consensus,
            AlgoParams::Apf(_) => Algo::Apf,
            AlgoParams::Ga(_) => Algo::Ga,
            AlgoParams::Aco(_) => Algo::Aco,
            AlgoParams::Bso(_) => Algo::Bso,
        }
    }

    /// Defaults for `algo` with comma-separated `key=value` overrides applied.
    pub fn with_overrides(algo: Algo, overrides: &str) -> Result<Self, BenchError> {
        let mut p = Self::defaults(algo);
        for item in overrides.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, v) = item.split_once('=').ok_or_else(|| BenchError::Malformed(item.to_string()))?;
            p.set(k.trim(), v)?;
        }
        Ok(p)
    }

    pub fn set(&mut self, key: &str, v: &str) -> Result<(), BenchError> {
        let algo = self.algo();
        let unknown = || BenchError::UnknownParam {
            algo,
            key: key.to_string(),
        };
        match self {
            AlgoParams::Shunting(p) => match key {
                "a" => p.a = parse(key, v)?,
                "b" => p.b = parse(key, v)?,
                "d" => p.d = parse(key, v)?,
                "e" => p.e = parse(key, v)?,
                "mu" => p.mu = parse(key, v)?,
                "r0" => p.r0 = parse(key, v)?,
                "dt" => p.dt = parse(key, v)?,
                "tol" => p.tol = parse(key, v)?,
                "max_iters" => p.max_iters = parse(key, v)?,
                _ => return Err(unknown()),
            },
            AlgoParams::Consensus { max_sweeps } => match key {
                "max_sweeps" => *max_sweeps = Some(parse(key, v)?),
                _ => return Err(unknown()),
            },
            AlgoParams::Apf(p) => match key {
                "alpha" => p.alpha = parse(key, v)?,
                "beta" => p.beta = parse(key, v)?,
                "lambda" => p.lambda = parse(key, v)?,
                "eta" => p.eta = parse(key, v)?,
                "rho0" => p.rho0 = parse(key, v)?,
                "d_safe" => p.d_safe = parse(key, v)?,
                "dt" => p.dt = parse(key, v)?,
                "v_max" => p.v_max = parse(key, v)?,
                "goal_eps" => p.goal_eps = parse(key, v)?,
                "max_steps" => p.max_steps = parse(key, v)?,
                _ => return Err(unknown()),
            },
            AlgoParams::Ga(p) => match key {
                "population" => p.population = parse(key, v)?,
                "generations" => p.generations = parse(key, v)?,
                "crossover_rate" => p.crossover_rate = parse(key, v)?,
                "mutation_rate" => p.mutation_rate = parse(key, v)?,
                "waypoints" => p.waypoints = parse(key, v)?,
                "mutation_radius" => p.mutation_radius = parse(key, v)?,
                "r_term" => p.fitness.r_term = parse(key, v)?,
                _ => return Err(unknown()),
            },
            AlgoParams::Aco(p) => match key {
                "ants" => p.ants = parse(key, v)?,
                "iterations" => p.iterations = parse(key, v)?,
                "alpha_ph" => p.alpha_ph = parse(key, v)?,
                "beta_h" => p.beta_h = parse(key, v)?,
                "beta_e" => p.beta_e = parse(key, v)?,
                "q" => p.q = parse(key, v)?,
                "elitist_bonus" => p.elitist_bonus = parse(key, v)?,
                "tau0" => p.tau0 = parse(key, v)?,
                _ => return Err(unknown()),
            },
            AlgoParams::Bso(p) => match key {
                "swarm" => p.swarm = parse(key, v)?,
                "iterations" => p.iterations = parse(key, v)?,
                "waypoints" => p.waypoints = parse(key, v)?,
                "w" => p.w = parse(key, v)?,
                "c1" => p.c1 = parse(key, v)?,
                "c2" => p.c2 = parse(key, v)?,
                "lambda_b" => p.lambda_b = parse(key, v)?,
                "gamma" => p.gamma = parse(key, v)?,
                "delta0" => p.delta0 = parse(key, v)?,
                "d0" => p.d0 = parse(key, v)?,
                "v_max" => p.v_max = parse(key, v)?,
                "jitter" => p.jitter = parse(key, v)?,
                "chemotaxis" => p.chemotaxis = parse(key, v)?,
                "r_term" => p.fitness.r_term = parse(key, v)?,
                _ => return Err(unknown()),
            },
        }
        Ok(())
    }

    /// Range checks, without running anything.
    pub fn validate(&self) -> Result<(), BenchError> {
        let msg = |e: &dyn fmt::Display| BenchError::Params(e.to_string());
        match self {
            AlgoParams::Shunting(p) => p.validate().map_err(|e| msg(&e)),
            AlgoParams::Consensus { .. } => Ok(()),
            AlgoParams::Apf(p) => p.validate().map_err(|e| msg(&e)),
            AlgoParams::Ga(p) => p.validate().map_err(|e| msg(&e)),
            AlgoParams::Aco(p) => p.validate().map_err(|e| msg(&e)),
            AlgoParams::Bso(p) => p.validate().map_err(|e| msg(&e)),
        }
    }
}
