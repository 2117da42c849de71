use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::seeding::min_cells;
use super::{check, mean, unreachable_outcome, Outcome, ParamError, TraceRow};
use crate::grid::{Coord, GridMap, Neighborhood};
use crate::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct AcoParams<T> {
    pub ants: usize,
    pub iterations: usize,
    /// Pheromone exponent.
    pub alpha_ph: T,
    /// Heuristic exponent.
    pub beta_h: T,
    /// Evaporation rate in `(0, 1)`.
    pub beta_e: T,
    pub q: T,
    pub elitist_bonus: T,
    pub tau0: T,
}

impl<T: Scalar> Default for AcoParams<T> {
    fn default() -> Self {
        Self {
            ants: 20,
            iterations: 150,
            alpha_ph: T::one(),
            beta_h: T::lit(8.0),
            beta_e: T::lit(0.1),
            q: T::one(),
            elitist_bonus: T::lit(5.0),
            tau0: T::one(),
        }
    }
}

impl<T: Scalar> AcoParams<T> {
    pub fn validate(&self) -> Result<(), ParamError> {
        check(self.ants >= 1, "ants", "must be at least 1")?;
        check(self.alpha_ph >= T::zero(), "alpha_ph", "must be nonnegative")?;
        check(self.beta_h >= T::zero(), "beta_h", "must be nonnegative")?;
        check(
            self.beta_e > T::zero() && self.beta_e < T::one(),
            "beta_e",
            "must lie strictly between 0 and 1",
        )?;
        check(self.q > T::zero(), "q", "must be positive")?;
        check(self.elitist_bonus >= T::zero(), "elitist_bonus", "must be nonnegative")?;
        check(self.tau0 > T::zero(), "tau0", "must be positive")
    }
}

/// Slot of the undirected edge `{a, b}` in a `rows * cols * 4` table, or
/// `None` if the cells are not 8-adjacent. Each cell owns its edges to the
/// east, south-east, south and south-west.
pub fn edge_index(cols: usize, a: Coord, b: Coord) -> Option<usize> {
    if !a.is_adjacent8(b) {
        return None;
    }
    let (from, to) = if (b.row, b.col) > (a.row, a.col) { (a, b) } else { (b, a) };
    let dir = match (to.row - from.row, to.col as isize - from.col as isize) {
        (0, 1) => 0,
        (1, 1) => 1,
        (1, 0) => 2,
        (1, -1) => 3,
        _ => unreachable!("ordered 8-adjacent pair"),
    };
    Some((from.row * cols + from.col) * 4 + dir)
}

/// Pheromone on the undirected edges of an 8-connected grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Pheromone<T> {
    rows: usize,
    cols: usize,
    tau: Vec<T>,
    beta_e: T,
    q: T,
    tau_min: T,
}

impl<T: Scalar> Pheromone<T> {
    pub fn new(rows: usize, cols: usize, tau0: T, beta_e: T, q: T) -> Self {
        Self {
            rows,
            cols,
            tau: vec![tau0; rows * cols * 4],
            beta_e,
            q,
            tau_min: T::lit(1e-4) * q,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn q(&self) -> T {
        self.q
    }

    pub fn tau_min(&self) -> T {
        self.tau_min
    }

    pub fn get(&self, a: Coord, b: Coord) -> Option<T> {
        edge_index(self.cols, a, b).map(|i| self.tau[i])
    }

    /// Evaporates every edge and adds the summed deposits:
    /// `tau <- (1 - beta_e) tau + sum_k amount_k` over tours using the edge,
    /// then floors at `1e-4 q`.
    pub fn update(&mut self, deposits: &[(&[Coord], T)]) {
        let mut delta = vec![T::zero(); self.tau.len()];
        for (tour, amount) in deposits {
            for w in tour.windows(2) {
                if let Some(i) = edge_index(self.cols, w[0], w[1]) {
                    delta[i] += *amount;
                }
            }
        }
        let keep = T::one() - self.beta_e;
        for (t, d) in self.tau.iter_mut().zip(delta) {
            *t = (keep * *t + d).max(self.tau_min);
        }
    }
}

/// One ant walk from start to target over unvisited free cells.
///
/// A move to `n` is chosen with probability proportional to
/// `tau^alpha_ph * (1/h)^beta_h`, where `h` is the straight-line distance
/// from `n` to the target; an adjacent target is always taken. The ant dies
/// (returns `None`) when it has no unvisited move left.
pub fn construct_tour<T: Scalar, R: Rng + ?Sized>(
    tau: &Pheromone<T>,
    map: &GridMap,
    p: &AcoParams<T>,
    rng: &mut R,
) -> Option<Vec<Coord>> {
    let target = map.target();
    let mut visited = vec![false; map.len()];
    let mut at = map.start();
    visited[map.index(at)] = true;
    let mut tour = vec![at];
    let mut cands: Vec<(Coord, T)> = Vec::with_capacity(8);
    let cap = 4 * map.len();
    while at != target {
        if tour.len() > cap {
            return None;
        }
        cands.clear();
        let mut total = T::zero();
        if map.can_step(at, target) {
            tour.push(target);
            break;
        }
        for n in map.moves(at, Neighborhood::Eight) {
            if visited[map.index(n)] {
                continue;
            }
            let h = n.euclid::<T>(target);
            let t = tau.get(at, n).expect("moves are adjacent");
            let w = t.powf(p.alpha_ph) * h.recip().powf(p.beta_h);
            total += w;
            cands.push((n, w));
        }
        if cands.is_empty() {
            return None;
        }
        let mut r = T::lit(rng.random::<f64>()) * total;
        let mut pick = cands[cands.len() - 1].0;
        for &(n, w) in &cands {
            if r < w {
                pick = n;
                break;
            }
            r -= w;
        }
        at = pick;
        visited[map.index(at)] = true;
        tour.push(at);
    }
    Some(tour)
}

/// Removes detours: whenever a later tour cell can be reached from an
/// earlier one in a single step, the cells in between are dropped.
pub fn prune_detours(map: &GridMap, tour: &[Coord]) -> Vec<Coord> {
    let mut out = Vec::with_capacity(tour.len());
    let mut i = 0;
    while i < tour.len() {
        out.push(tour[i]);
        let jump = (i + 2..tour.len()).rev().find(|&j| map.can_step(tour[i], tour[j]));
        i = jump.unwrap_or(i + 1);
    }
    out
}

fn tour_length<T: Scalar>(tour: &[Coord]) -> T {
    tour.windows(2)
        .fold(T::zero(), |acc, w| acc + Neighborhood::step_cost::<T>(w[0], w[1]))
}

/// Runs the elitist ant colony from `seed`.
pub fn run_aco<T: Scalar>(map: &GridMap, p: &AcoParams<T>, seed: u64) -> Result<Outcome<T>, ParamError> {
    p.validate()?;
    if min_cells(map).is_none() {
        return Ok(unreachable_outcome());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tau = Pheromone::new(map.rows(), map.cols(), p.tau0, p.beta_e, p.q);
    let mut best: Option<(Vec<Coord>, T)> = None;
    let mut found_at = 0;
    let mut evaluations = 0;
    let mut trace = Vec::with_capacity(p.iterations);

    for it in 1..=p.iterations {
        let mut tours = Vec::with_capacity(p.ants);
        for _ in 0..p.ants {
            evaluations += 1;
            if let Some(t) = construct_tour(&tau, map, p, &mut rng) {
                let t = prune_detours(map, &t);
                let len = tour_length::<T>(&t);
                tours.push((t, len));
            }
        }
        for (t, len) in &tours {
            if best.as_ref().is_none_or(|(_, b)| *len < *b) {
                best = Some((t.clone(), *len));
                found_at = it;
            }
        }
        let mut deposits: Vec<(&[Coord], T)> = tours.iter().map(|(t, len)| (t.as_slice(), p.q / *len)).collect();
        if let Some((t, len)) = &best {
            deposits.push((t.as_slice(), p.elitist_bonus * p.q / *len));
        }
        tau.update(&deposits);
        trace.push(TraceRow {
            iter: it,
            best_cost: best.as_ref().map_or(T::infinity(), |b| b.1),
            mean_cost: mean(tours.iter().map(|t| t.1)),
            evaluations,
        });
    }

    Ok(Outcome {
        cost: best.as_ref().map_or(T::infinity(), |b| b.1),
        waypoints: best.map(|b| b.0),
        iterations_to_best: found_at,
        evaluations,
        trace,
    })
}
