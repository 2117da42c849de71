use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::fitness::{crossover, polyline_clear, select, Chromosome, FitnessParams, Genes};
use super::seeding::{clear_waypoints, min_cells, shortest_cells, Stitcher};
use super::{check, mean, unit_interval, unreachable_outcome, Outcome, ParamError, TraceRow};
use crate::grid::{Coord, GridMap};
use crate::Scalar;

const MUTATION_TRIES: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct GaParams<T> {
    pub population: usize,
    pub generations: usize,
    pub crossover_rate: T,
    pub mutation_rate: T,
    /// Interior waypoints per chromosome; capped by the shortest possible path.
    pub waypoints: usize,
    /// Chebyshev radius within which a mutated waypoint is re-drawn.
    pub mutation_radius: usize,
    pub fitness: FitnessParams<T>,
}

impl<T: Scalar> Default for GaParams<T> {
    fn default() -> Self {
        Self {
            population: 40,
            generations: 150,
            crossover_rate: T::lit(0.8),
            mutation_rate: T::lit(0.4),
            waypoints: 6,
            mutation_radius: 2,
            fitness: FitnessParams::default(),
        }
    }
}

impl<T: Scalar> GaParams<T> {
    pub fn validate(&self) -> Result<(), ParamError> {
        check(self.population >= 2, "population", "must be at least 2")?;
        check(unit_interval(self.crossover_rate), "crossover_rate", "must lie in [0, 1]")?;
        check(unit_interval(self.mutation_rate), "mutation_rate", "must lie in [0, 1]")?;
        check(self.mutation_radius >= 1, "mutation_radius", "must be at least 1")?;
        check(self.fitness.r_term >= T::zero(), "r_term", "must be nonnegative")
    }
}

fn draw_near<R: Rng + ?Sized>(map: &GridMap, c: Coord, radius: usize, rng: &mut R) -> Option<Coord> {
    let r0 = c.row.saturating_sub(radius);
    let r1 = (c.row + radius).min(map.rows() - 1);
    let c0 = c.col.saturating_sub(radius);
    let c1 = (c.col + radius).min(map.cols() - 1);
    (0..MUTATION_TRIES)
        .map(|_| Coord::new(rng.random_range(r0..=r1), rng.random_range(c0..=c1)))
        .find(|&n| map.is_free(n))
}

fn has_duplicates(w: &[Coord]) -> bool {
    w.iter().enumerate().any(|(i, a)| w[i + 1..].contains(a))
}

fn try_mutation<R: Rng + ?Sized>(map: &GridMap, w: &[Coord], radius: usize, rng: &mut R) -> Option<Vec<Coord>> {
    let n = w.len();
    let (i, j) = if n >= 5 {
        let i = rng.random_range(1..=n - 4);
        (i, rng.random_range(i + 2..=n - 2))
    } else {
        let i = rng.random_range(1..=n - 2);
        (i, i)
    };
    let mut out = w.to_vec();
    out[i] = draw_near(map, w[i], radius, rng)?;
    if j > i {
        out[j] = draw_near(map, w[j], radius, rng)?;
        let between = shortest_cells(map, out[i], out[j])?;
        let need = j - i - 1;
        if between.len() < need + 2 {
            return None;
        }
        out[i + 1..j].copy_from_slice(&clear_waypoints(map, &between, need));
    } else if shortest_cells(map, map.start(), out[i]).is_none() {
        return None;
    }
    Some(out)
}

/// Waypoint mutation.
///
/// Two interior waypoints at least two positions apart are re-drawn within
/// `radius` cells of their old positions and the waypoints between them are
/// re-sampled along a shortest path joining the new pair. Chromosomes with
/// fewer than three interior waypoints re-draw a single waypoint. The result
/// never repeats a waypoint, and stays feasible when the input was; if no
/// such mutation is found the input is returned unchanged.
pub fn mutate<T: Scalar, R: Rng + ?Sized>(
    c: &Chromosome<T>,
    map: &GridMap,
    radius: usize,
    rng: &mut R,
) -> Chromosome<T> {
    let Genes::Waypoints(w) = &c.genes else {
        return c.clone();
    };
    if w.len() < 3 {
        return c.clone();
    }
    let feasible = polyline_clear(map, w);
    for _ in 0..MUTATION_TRIES {
        let Some(out) = try_mutation(map, w, radius, rng) else {
            continue;
        };
        if has_duplicates(&out) || (feasible && !polyline_clear(map, &out)) {
            continue;
        }
        return Chromosome::waypoints(out);
    }
    c.clone()
}

fn best_index<T: Scalar>(pop: &[Chromosome<T>]) -> usize {
    let mut best = 0;
    for (i, c) in pop.iter().enumerate() {
        if c.fitness() > pop[best].fitness() {
            best = i;
        }
    }
    best
}

fn feasible_cost<T: Scalar>(c: &Chromosome<T>) -> T {
    match c.eval {
        Some(e) if e.feasible => e.length,
        _ => T::infinity(),
    }
}

/// Runs the genetic algorithm from `seed`.
pub fn run_ga<T: Scalar>(map: &GridMap, p: &GaParams<T>, seed: u64) -> Result<Outcome<T>, ParamError> {
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
    let k = p.waypoints.min(cells - 2);
    let stitcher = Stitcher::new(map);
    let mut evaluations = 0;
    let evaluate = |c: &mut Chromosome<T>, evaluations: &mut usize| {
        *evaluations += 1;
        c.evaluate(map, &p.fitness).expect("chromosomes join distinct endpoints");
    };

    let mut pop: Vec<Chromosome<T>> = (0..p.population)
        .map(|_| {
            let path = stitcher.random_path(&mut rng);
            let mut w = vec![map.start()];
            w.extend(clear_waypoints(map, &path, k));
            w.push(map.target());
            Chromosome::waypoints(w)
        })
        .collect();
    for c in &mut pop {
        evaluate(c, &mut evaluations);
    }
    let mut best = pop[best_index(&pop)].clone();
    let mut found_at = 0;
    let mut trace = Vec::with_capacity(p.generations);

    for gen in 1..=p.generations {
        let selected = select(&pop, &mut rng).expect("population is evaluated");
        let mut next = Vec::with_capacity(p.population);
        next.push(selected[0].clone());
        let mut rest: Vec<Chromosome<T>> = selected[1..].to_vec();
        rest.shuffle(&mut rng);
        let mut children = Vec::with_capacity(rest.len());
        for pair in rest.chunks(2) {
            match pair {
                [a, b] if T::lit(rng.random::<f64>()) < p.crossover_rate => {
                    let (x, y) = crossover(a, b, &mut rng).expect("chromosomes share a length");
                    children.push(x);
                    children.push(y);
                }
                _ => children.extend(pair.iter().cloned()),
            }
        }
        for mut c in children {
            if T::lit(rng.random::<f64>()) < p.mutation_rate {
                c = mutate(&c, map, p.mutation_radius, &mut rng);
            }
            if c.eval.is_none() {
                evaluate(&mut c, &mut evaluations);
            }
            next.push(c);
        }
        pop = next;

        let gen_best = &pop[best_index(&pop)];
        if gen_best.fitness() > best.fitness() {
            best = gen_best.clone();
            found_at = gen;
        }
        trace.push(TraceRow {
            iter: gen,
            best_cost: feasible_cost(&best),
            mean_cost: mean(pop.iter().map(|c| c.eval.map_or(T::nan(), |e| e.length))),
            evaluations,
        });
    }

    let feasible = best.eval.is_some_and(|e| e.feasible);
    Ok(Outcome {
        cost: feasible_cost(&best),
        waypoints: feasible.then(|| best.as_waypoints().expect("waypoint encoding").to_vec()),
        iterations_to_best: found_at,
        evaluations,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn walled() -> GridMap {
        GridMap::from_ascii(&[
            "S.........",
            "..........",
            "....#.....",
            "....#.....",
            "....#.....",
            "....#.....",
            "....#.....",
            ".........T",
        ])
        .unwrap()
    }

    #[test]
    fn mutation_keeps_feasibility_and_uniqueness() {
        let map = walled();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let st = Stitcher::new(&map);
        for _ in 0..200 {
            let path = st.random_path(&mut rng);
            let mut w = vec![map.start()];
            w.extend(super::super::seeding::sample_interior(&path, 5));
            w.push(map.target());
            if !polyline_clear(&map, &w) {
                continue;
            }
            let c = Chromosome::<f64>::waypoints(w.clone());
            let m = mutate(&c, &map, 2, &mut rng);
            let mw = m.as_waypoints().unwrap();
            assert_eq!(mw.len(), w.len());
            assert_eq!((mw[0], mw[6]), (map.start(), map.target()));
            assert!(!has_duplicates(mw));
            assert!(polyline_clear(&map, mw));
        }
    }

    #[test]
    fn runs_are_reproducible_and_traces_monotone() {
        let map = walled();
        let p = GaParams::<f64> {
            generations: 40,
            ..GaParams::default()
        };
        let a = run_ga(&map, &p, 11).unwrap();
        let b = run_ga(&map, &p, 11).unwrap();
        assert_eq!(a, b);
        assert!(a.success());
        assert!(a.trace.windows(2).all(|w| w[1].best_cost <= w[0].best_cost));
        let w = a.waypoints.unwrap();
        assert!(polyline_clear(&map, &w));
    }

    #[test]
    fn unreachable_target_fails_cleanly() {
        let map = GridMap::from_ascii(&["S#.", "##.", "..T"]).unwrap();
        let out = run_ga(&map, &GaParams::<f64>::default(), 0).unwrap();
        assert!(!out.success());
        assert!(out.cost.is_infinite());
    }

    #[test]
    fn rejects_bad_params() {
        let p = GaParams::<f64> {
            population: 1,
            ..GaParams::default()
        };
        assert_eq!(run_ga(&walled(), &p, 0).unwrap_err().name, "population");
    }
}
