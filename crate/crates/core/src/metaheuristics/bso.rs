use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::fitness::{evaluate_waypoints, FitnessParams};
use super::seeding::{clear_waypoints, min_cells, Stitcher};
use super::{check, mean, unit_interval, unreachable_outcome, Outcome, ParamError, TraceRow};
use crate::grid::{Coord, GridMap};
use crate::{sign0, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub struct BsoParams<T> {
    pub swarm: usize,
    pub iterations: usize,
    /// Interior waypoints encoded per beetle (two coordinates each).
    pub waypoints: usize,
    /// Inertia weight.
    pub w: T,
    pub c1: T,
    pub c2: T,
    /// Weight of the swarm velocity against the antenna step.
    pub lambda_b: T,
    /// Per-iteration decay of the antenna step size.
    pub gamma: T,
    /// Initial antenna step size.
    pub delta0: T,
    /// Distance between the two antennae.
    pub d0: T,
    /// Per-component velocity limit.
    pub v_max: T,
    /// Uniform jitter added to initial waypoint coordinates.
    pub jitter: T,
    /// Choose headings by fitness rank and failure count instead of at random.
    pub chemotaxis: bool,
    pub fitness: FitnessParams<T>,
}

impl<T: Scalar> Default for BsoParams<T> {
    fn default() -> Self {
        Self {
            swarm: 12,
            iterations: 40,
            waypoints: 4,
            w: T::lit(0.6),
            c1: T::lit(1.2),
            c2: T::lit(1.2),
            lambda_b: T::lit(0.5),
            gamma: T::lit(0.95),
            delta0: T::lit(2.0),
            d0: T::one(),
            v_max: T::lit(2.0),
            jitter: T::lit(0.5),
            chemotaxis: true,
            fitness: FitnessParams::default(),
        }
    }
}

impl<T: Scalar> BsoParams<T> {
    pub fn validate(&self) -> Result<(), ParamError> {
        check(self.swarm >= 1, "swarm", "must be at least 1")?;
        check(self.waypoints >= 1, "waypoints", "must be at least 1")?;
        check(self.w >= T::zero(), "w", "must be nonnegative")?;
        check(self.c1 >= T::zero() && self.c2 >= T::zero(), "c1/c2", "must be nonnegative")?;
        check(unit_interval(self.lambda_b), "lambda_b", "must lie in [0, 1]")?;
        check(self.gamma > T::zero() && self.gamma <= T::one(), "gamma", "must lie in (0, 1]")?;
        check(self.delta0 > T::zero(), "delta0", "must be positive")?;
        check(self.d0 > T::zero(), "d0", "must be positive")?;
        check(self.v_max > T::zero(), "v_max", "must be positive")?;
        check(self.jitter >= T::zero(), "jitter", "must be nonnegative")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Beetle<T> {
    pub x: Vec<T>,
    pub v: Vec<T>,
    pub fitness: T,
    pub pbest: Vec<T>,
    pub pbest_fitness: T,
    /// Current antenna step size.
    pub delta: T,
    /// Consecutive moves that did not improve fitness.
    pub failures: u32,
    /// Unit direction of the last antenna move, zero before the first one.
    pub last_dir: Vec<T>,
}

impl<T: Scalar> Beetle<T> {
    pub fn new(x: Vec<T>, v: Vec<T>, fitness: T, delta: T) -> Self {
        let n = x.len();
        Self {
            pbest: x.clone(),
            x,
            v,
            fitness,
            pbest_fitness: fitness,
            delta,
            failures: 0,
            last_dir: vec![T::zero(); n],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Heading<T> {
    /// Fresh random unit direction, drawn inside the step.
    Random,
    TrackBest(Vec<T>),
    TrackCentroid(Vec<T>),
    /// Swim straight along this direction without probing the antennae.
    Reverse(Vec<T>),
}

/// Swarm-wide quantities a beetle needs to pick a heading.
#[derive(Debug, Clone, PartialEq)]
pub struct SwarmStats<T> {
    /// Fitness at or above which a beetle counts as elite (top 20 %).
    pub elite_threshold: T,
    pub gbest: Vec<T>,
    pub centroid: Vec<T>,
}

impl<T: Scalar> SwarmStats<T> {
    pub fn new(beetles: &[Beetle<T>], gbest: &[T]) -> Self {
        let mut fits: Vec<T> = beetles.iter().map(|b| b.fitness).collect();
        fits.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        // Nearest-rank 80th percentile.
        let rank = (fits.len() * 4).div_ceil(5).max(1);
        let dims = gbest.len();
        let mut centroid = vec![T::zero(); dims];
        for b in beetles {
            for (c, &x) in centroid.iter_mut().zip(&b.x) {
                *c += x;
            }
        }
        let n = T::from_count(beetles.len().max(1));
        centroid.iter_mut().for_each(|c| *c /= n);
        Self {
            elite_threshold: fits.get(rank - 1).copied().unwrap_or(T::neg_infinity()),
            gbest: gbest.to_vec(),
            centroid,
        }
    }
}

fn norm<T: Scalar>(v: &[T]) -> T {
    v.iter().fold(T::zero(), |acc, &x| acc + x * x).sqrt()
}

fn unit_towards<T: Scalar>(from: &[T], to: &[T]) -> Option<Vec<T>> {
    let d: Vec<T> = to.iter().zip(from).map(|(&t, &f)| t - f).collect();
    let n = norm(&d);
    (n > T::zero()).then(|| d.into_iter().map(|x| x / n).collect())
}

/// Uniformly distributed unit vector in `n` dimensions.
pub fn random_direction<T: Scalar, R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<T> {
    loop {
        let g: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let len = g.iter().map(|x| x * x).sum::<f64>().sqrt();
        if len > 0.0 && len.is_finite() {
            return g.into_iter().map(|x| T::lit(x / len)).collect();
        }
    }
}

/// Picks the next heading from the beetle's rank and recent failures.
///
/// After one failed move the beetle explores at random; after two or more it
/// reverses its last move. Otherwise elite beetles head for the global best
/// and the rest for the swarm centroid.
pub fn chemotaxis_direction<T: Scalar, R: Rng + ?Sized>(
    beetle: &Beetle<T>,
    stats: &SwarmStats<T>,
    rng: &mut R,
) -> Heading<T> {
    match beetle.failures {
        0 => {
            let elite = beetle.fitness >= stats.elite_threshold;
            let goal = if elite { &stats.gbest } else { &stats.centroid };
            let dir = unit_towards(&beetle.x, goal).unwrap_or_else(|| random_direction(beetle.x.len(), rng));
            if elite {
                Heading::TrackBest(dir)
            } else {
                Heading::TrackCentroid(dir)
            }
        }
        1 => Heading::Random,
        _ if norm(&beetle.last_dir) > T::zero() => Heading::Reverse(beetle.last_dir.iter().map(|&x| -x).collect()),
        _ => Heading::Random,
    }
}

/// One beetle move; returns the number of objective evaluations.
///
/// The antennae probe `f` at `x ± d0/2 b` and the beetle steps `delta` toward
/// the better side (no step on a tie unless a tracking heading is given,
/// which then steps forward). The swarm velocity is updated as in particle
/// swarm optimisation and the two moves are blended by `lambda_b`. Finally
/// `delta` decays by `gamma` and the personal best and failure count are
/// updated. Positions are not clamped here.
pub fn antennae_step<T, F, R>(
    beetle: &mut Beetle<T>,
    f: &mut F,
    gbest: &[T],
    heading: Heading<T>,
    p: &BsoParams<T>,
    rng: &mut R,
) -> usize
where
    T: Scalar,
    F: FnMut(&[T]) -> T,
    R: Rng + ?Sized,
{
    let n = beetle.x.len();
    let mut evals = 0;
    let reverse = matches!(heading, Heading::Reverse(_));
    let (b, s) = match heading {
        Heading::Reverse(d) => (d, T::one()),
        h => {
            let tracking = !matches!(h, Heading::Random);
            let b = match h {
                Heading::TrackBest(d) | Heading::TrackCentroid(d) => d,
                _ => random_direction(n, rng),
            };
            let half = p.d0 / T::lit(2.0);
            let right: Vec<T> = beetle.x.iter().zip(&b).map(|(&x, &d)| x + half * d).collect();
            let left: Vec<T> = beetle.x.iter().zip(&b).map(|(&x, &d)| x - half * d).collect();
            let s = sign0(f(&right) - f(&left));
            evals += 2;
            (b, if s == T::zero() && tracking { T::one() } else { s })
        }
    };

    let r1 = T::lit(rng.random::<f64>());
    let r2 = T::lit(rng.random::<f64>());
    for i in 0..n {
        let v = p.w * beetle.v[i] + p.c1 * r1 * (beetle.pbest[i] - beetle.x[i]) + p.c2 * r2 * (gbest[i] - beetle.x[i]);
        beetle.v[i] = v.max(-p.v_max).min(p.v_max);
    }
    let step = beetle.delta * s;
    for i in 0..n {
        let xi = step * b[i];
        beetle.x[i] += p.lambda_b * beetle.v[i] + (T::one() - p.lambda_b) * xi;
    }
    if s != T::zero() {
        beetle.last_dir = b.iter().map(|&d| d * s).collect();
    }
    beetle.delta *= p.gamma;

    let fit = f(&beetle.x);
    evals += 1;
    if fit > beetle.fitness || reverse {
        beetle.failures = 0;
    } else {
        beetle.failures += 1;
    }
    beetle.fitness = fit;
    if fit > beetle.pbest_fitness {
        beetle.pbest_fitness = fit;
        beetle.pbest.clone_from(&beetle.x);
    }
    evals
}

/// Waypoints encoded by a position vector of `(row, col)` pairs: each pair is
/// rounded to the nearest cell inside the map, bracketed by start and target,
/// and repeated consecutive cells are merged.
pub fn decode_position<T: Scalar>(x: &[T], map: &GridMap) -> Vec<Coord> {
    let snap = |v: T, hi: usize| -> usize {
        let r = v.round().to_f64_lossy();
        if r.is_nan() || r <= 0.0 {
            0
        } else {
            (r as usize).min(hi)
        }
    };
    let mut out = vec![map.start()];
    for pair in x.chunks_exact(2) {
        out.push(Coord::new(snap(pair[0], map.rows() - 1), snap(pair[1], map.cols() - 1)));
    }
    out.push(map.target());
    out.dedup();
    out
}

/// Runs the beetle swarm from `seed`.
pub fn run_bso<T: Scalar>(map: &GridMap, p: &BsoParams<T>, seed: u64) -> Result<Outcome<T>, ParamError> {
    p.validate()?;
    let Some(cells) = min_cells(map) else {
        return Ok(unreachable_outcome());
    };
    if cells == 1 {
        return Ok(Outcome {
            waypoints: Some(vec![map.start()]),
            cost: T::zero(),
            iterations_to_best: 0,
            evaluations: 0,
            trace: Vec::new(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = p.waypoints;
    let dims = 2 * k;
    let hi: Vec<T> = (0..dims)
        .map(|i| T::from_count(if i % 2 == 0 { map.rows() - 1 } else { map.cols() - 1 }))
        .collect();
    let mut f = |x: &[T]| -> T {
        evaluate_waypoints(map, &decode_position(x, map), &p.fitness)
            .expect("decoded paths join distinct endpoints")
            .fitness
    };
    let length_of = |x: &[T]| -> (T, bool) {
        let e = evaluate_waypoints(map, &decode_position(x, map), &p.fitness).expect("distinct endpoints");
        (e.length, e.feasible)
    };

    let stitcher = Stitcher::new(map);
    let mut evaluations = 0;
    let mut swarm: Vec<Beetle<T>> = (0..p.swarm)
        .map(|_| {
            let path = stitcher.random_path(&mut rng);
            let mut x = Vec::with_capacity(dims);
            for c in clear_waypoints(map, &path, k) {
                for v in [c.row, c.col] {
                    let j = (2.0 * rng.random::<f64>() - 1.0) * p.jitter.to_f64_lossy();
                    x.push(T::from_count(v) + T::lit(j));
                }
            }
            for (xi, &h) in x.iter_mut().zip(&hi) {
                *xi = xi.max(T::zero()).min(h);
            }
            let v = (0..dims)
                .map(|_| T::lit(2.0 * rng.random::<f64>() - 1.0) * p.v_max)
                .collect();
            evaluations += 1;
            let fit = f(&x);
            Beetle::new(x, v, fit, p.delta0)
        })
        .collect();

    let mut best = swarm
        .iter()
        .fold(&swarm[0], |a, b| if b.fitness > a.fitness { b } else { a })
        .clone();
    let (mut gbest, mut gbest_fit) = (best.x.clone(), best.fitness);
    let mut found_at = 0;
    let mut trace = Vec::with_capacity(p.iterations);

    for it in 1..=p.iterations {
        let stats = SwarmStats::new(&swarm, &gbest);
        for b in swarm.iter_mut() {
            let heading = if p.chemotaxis {
                chemotaxis_direction(b, &stats, &mut rng)
            } else {
                Heading::Random
            };
            evaluations += antennae_step(b, &mut f, &gbest, heading, p, &mut rng);
            for (xi, &h) in b.x.iter_mut().zip(&hi) {
                *xi = xi.max(T::zero()).min(h);
            }
            if b.fitness > gbest_fit {
                gbest_fit = b.fitness;
                gbest.clone_from(&b.x);
                found_at = it;
            }
        }
        let (len, feasible) = length_of(&gbest);
        trace.push(TraceRow {
            iter: it,
            best_cost: if feasible { len } else { T::infinity() },
            mean_cost: mean(swarm.iter().map(|b| length_of(&b.x).0)),
            evaluations,
        });
    }
    best.x = gbest;

    let (len, feasible) = length_of(&best.x);
    Ok(Outcome {
        waypoints: feasible.then(|| decode_position(&best.x, map)),
        cost: if feasible { len } else { T::infinity() },
        iterations_to_best: found_at,
        evaluations,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> BsoParams<f64> {
        BsoParams::default()
    }

    #[test]
    fn directions_are_unit() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for n in [1, 2, 7] {
            for _ in 0..100 {
                let d: Vec<f64> = random_direction(n, &mut rng);
                assert!((norm(&d) - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn flat_objective_moves_by_velocity_only() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let params = BsoParams {
            w: 1.0,
            c1: 0.0,
            c2: 0.0,
            lambda_b: 0.5,
            ..p()
        };
        let mut b = Beetle::new(vec![0.0, 0.0], vec![1.0, -1.0], 0.0, 1.0);
        let evals = antennae_step(&mut b, &mut |_: &[f64]| 0.0, &[0.0, 0.0], Heading::Random, &params, &mut rng);
        assert_eq!(evals, 3);
        assert_eq!(b.x, vec![0.5, -0.5]);
        assert_eq!(b.failures, 1);
    }

    #[test]
    fn step_size_decays_geometrically() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let params = BsoParams { gamma: 0.5, ..p() };
        let mut b = Beetle::new(vec![3.0], vec![0.0], 0.0, 2.0);
        let mut f = |x: &[f64]| -x[0] * x[0];
        for k in 1..=8 {
            antennae_step(&mut b, &mut f, &[0.0], Heading::Random, &params, &mut rng);
            assert_eq!(b.delta, 2.0 * 0.5f64.powi(k));
        }
    }

    #[test]
    fn plain_antennae_search_descends() {
        let params = BsoParams {
            w: 0.0,
            c1: 0.0,
            c2: 0.0,
            lambda_b: 0.0,
            gamma: 0.9,
            d0: 0.1,
            chemotaxis: false,
            ..p()
        };
        let mut f = |x: &[f64]| -x.iter().map(|v| v * v).sum::<f64>();
        for seed in 0..10 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x0 = vec![3.0, -2.0, 1.0];
            let f0 = f(&x0);
            let mut b = Beetle::new(x0, vec![0.0; 3], f0, 0.5);
            for _ in 0..200 {
                let before = b.x.clone();
                let delta = b.delta;
                antennae_step(&mut b, &mut f, &[0.0; 3], Heading::Random, &params, &mut rng);
                let moved = norm(&b.x.iter().zip(&before).map(|(a, c)| a - c).collect::<Vec<_>>());
                assert!(moved == 0.0 || (moved - delta).abs() < 1e-12);
            }
            assert!(f(&b.x) > f0);
        }
    }

    #[test]
    fn heading_rules() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let good = Beetle::new(vec![1.0, 1.0], vec![0.0; 2], 5.0, 1.0);
        let poor = Beetle::new(vec![3.0, 3.0], vec![0.0; 2], 1.0, 1.0);
        let swarm = [good.clone(), poor.clone()];
        let stats = SwarmStats::new(&swarm, &good.x);
        assert_eq!(stats.centroid, vec![2.0, 2.0]);
        assert!(matches!(chemotaxis_direction(&good, &stats, &mut rng), Heading::TrackBest(_)));
        let h = chemotaxis_direction(&poor, &stats, &mut rng);
        let Heading::TrackCentroid(d) = h else {
            panic!("expected centroid tracking, got {h:?}");
        };
        assert!(d.iter().all(|&x| (x + 0.5f64.sqrt()).abs() < 1e-15));

        let mut failing = poor.clone();
        failing.failures = 1;
        assert_eq!(chemotaxis_direction(&failing, &stats, &mut rng), Heading::Random);
        failing.failures = 2;
        failing.last_dir = vec![1.0, 0.0];
        assert_eq!(chemotaxis_direction(&failing, &stats, &mut rng), Heading::Reverse(vec![-1.0, -0.0]));
    }

    #[test]
    fn reverse_swims_without_probing() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let params = BsoParams {
            lambda_b: 0.0,
            ..p()
        };
        let mut b = Beetle::new(vec![0.0], vec![0.0], 0.0, 1.0);
        b.failures = 2;
        let evals = antennae_step(&mut b, &mut |_: &[f64]| 0.0, &[0.0], Heading::Reverse(vec![-1.0]), &params, &mut rng);
        assert_eq!(evals, 1);
        assert_eq!(b.x, vec![-1.0]);
        assert_eq!(b.failures, 0);
    }

    #[test]
    fn decoding_snaps_and_merges() {
        let map = GridMap::from_ascii(&["S...", "....", "...T"]).unwrap();
        let w = decode_position(&[0.2, 0.4, 1.4, 1.6, 1.0, 2.2, -3.0, 9.0], &map);
        let c = Coord::new;
        assert_eq!(w, vec![c(0, 0), c(1, 2), c(0, 3), c(2, 3)]);
    }

    #[test]
    fn finds_feasible_paths_reproducibly() {
        let map = GridMap::from_ascii(&[
            "S.........",
            "..........",
            "....#.....",
            "....#.....",
            "....#.....",
            "..........",
            ".........T",
        ])
        .unwrap();
        let a = run_bso(&map, &p(), 8).unwrap();
        assert_eq!(a, run_bso(&map, &p(), 8).unwrap());
        assert!(a.success());
        assert!(super::super::polyline_clear(&map, a.waypoints.as_ref().unwrap()));
    }
}
