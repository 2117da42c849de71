//! Biased minimum-consensus shortest paths.
//!
//! Every free cell is a node. Leaders (targets) hold state 0. Each follower
//! relaxes toward `min_q (s_q + D_pq)` over its neighbors, with `D_pq` the
//! step cost. Updates are synchronous with unit gain, so one sweep replaces
//! every follower state by that minimum computed from the previous sweep.
//! Starting from `+inf` the states decrease monotonically and stop changing
//! once they equal the shortest-path distances to the nearest leader.

use thiserror::Error;

use crate::grid::{Coord, DistanceField, GridMap, Neighborhood, Path};
use crate::Scalar;

#[derive(Debug, Clone)]
pub struct ConsensusNet<T> {
    map: GridMap,
    nb: Neighborhood,
    leader: Vec<bool>,
    state: DistanceField<T>,
    sweeps: usize,
}

/// Leader set `{map.target()}`; every other free cell follows at `+inf`.
pub fn init_net<T: Scalar>(map: &GridMap, nb: Neighborhood) -> ConsensusNet<T> {
    init_net_with_leaders(map, nb, &[map.target()])
}

pub fn init_net_with_leaders<T: Scalar>(
    map: &GridMap,
    nb: Neighborhood,
    leaders: &[Coord],
) -> ConsensusNet<T> {
    let mut leader = vec![false; map.len()];
    let mut state = DistanceField::unreachable(map.rows(), map.cols());
    for &l in leaders.iter().filter(|&&l| map.is_free(l)) {
        leader[map.index(l)] = true;
        state.set(l, T::zero());
    }
    ConsensusNet {
        map: map.clone(),
        nb,
        leader,
        state,
        sweeps: 0,
    }
}

impl<T: Scalar> ConsensusNet<T> {
    pub fn map(&self) -> &GridMap {
        &self.map
    }

    pub fn neighborhood(&self) -> Neighborhood {
        self.nb
    }

    pub fn state(&self) -> &DistanceField<T> {
        &self.state
    }

    pub fn sweeps(&self) -> usize {
        self.sweeps
    }

    pub fn is_leader(&self, c: Coord) -> bool {
        self.leader[self.map.index(c)]
    }

    pub fn leaders(&self) -> impl Iterator<Item = Coord> + '_ {
        self.map.free_cells().filter(|&c| self.is_leader(c))
    }

    pub fn followers(&self) -> impl Iterator<Item = Coord> + '_ {
        self.map.free_cells().filter(|&c| !self.is_leader(c))
    }

    /// Undirected communication edges `(p, q, D_pq)` with `p < q`.
    pub fn edges(&self) -> Vec<(Coord, Coord, T)> {
        let mut out = Vec::new();
        for p in self.map.free_cells() {
            for q in self.map.moves(p, self.nb) {
                if p < q {
                    out.push((p, q, Neighborhood::step_cost::<T>(p, q)));
                }
            }
        }
        out
    }

    /// `min_q (s_q + D_pq)` over passable neighbors, from the current states.
    fn neighbor_min(&self, p: Coord) -> T {
        self.map
            .moves(p, self.nb)
            .map(|q| self.state.get(q) + Neighborhood::step_cost::<T>(p, q))
            .fold(T::infinity(), T::min)
    }

    /// One synchronous update of all followers. Returns the largest state
    /// change; a follower leaving `+inf` counts as an infinite change.
    pub fn sweep(&mut self) -> T {
        let mut next = self.state.clone();
        let mut max_change = T::zero();
        for p in self.map.free_cells() {
            if self.is_leader(p) {
                continue;
            }
            let old = self.state.get(p);
            let new = self.neighbor_min(p);
            let change = if old == new {
                T::zero()
            } else if old.is_infinite() || new.is_infinite() {
                T::infinity()
            } else {
                (new - old).abs()
            };
            max_change = max_change.max(change);
            next.set(p, new);
        }
        self.state = next;
        self.sweeps += 1;
        max_change
    }

    /// Whether every follower already equals its neighbor minimum.
    pub fn is_fixed_point(&self) -> bool {
        self.followers().all(|p| self.neighbor_min(p) == self.state.get(p))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution<T> {
    pub field: DistanceField<T>,
    /// Sweeps performed, including the final one that changed nothing.
    pub sweeps: usize,
    pub converged: bool,
}

/// Sweeps until nothing changes or `max_sweeps` is spent. Any connected grid
/// converges within `rows * cols` sweeps.
pub fn solve<T: Scalar>(net: &mut ConsensusNet<T>, max_sweeps: usize) -> Solution<T> {
    let mut converged = false;
    for _ in 0..max_sweeps {
        if net.sweep() == T::zero() {
            converged = true;
            break;
        }
    }
    Solution {
        field: net.state.clone(),
        sweeps: net.sweeps,
        converged,
    }
}

/// Convenience: distance field from the map's target with the default sweep budget.
pub fn distance_field<T: Scalar>(map: &GridMap, nb: Neighborhood) -> Solution<T> {
    let mut net = init_net(map, nb);
    solve(&mut net, map.len() + 1)
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BacktrackError {
    #[error("{0} is outside the map or an obstacle")]
    InvalidStart(Coord),
    #[error("{0} is unreachable")]
    Unreachable(Coord),
    #[error("field does not descend at {0}: no neighbor with a strictly smaller distance")]
    NoDescent(Coord),
    #[error("field revisits {0}")]
    Cycle(Coord),
    #[error("field is {field_rows}x{field_cols} but the map is {rows}x{cols}")]
    DimensionMismatch {
        field_rows: usize,
        field_cols: usize,
        rows: usize,
        cols: usize,
    },
}

/// Walks down the field from `from` to a zero-distance cell.
///
/// Each step goes to the passable neighbor minimizing `d(q) + D_pq` among
/// those with `d(q) < d(p)`, ties broken by canonical neighbor order. With
/// unit costs that is simply the neighbor closest to `d(p) - 1`. Visited
/// cells are marked and a revisit is reported as a corrupt field.
pub fn backtrack<T: Scalar>(
    field: &DistanceField<T>,
    map: &GridMap,
    nb: Neighborhood,
    from: Coord,
) -> Result<Path, BacktrackError> {
    if !field.matches_map(map) {
        return Err(BacktrackError::DimensionMismatch {
            field_rows: field.rows(),
            field_cols: field.cols(),
            rows: map.rows(),
            cols: map.cols(),
        });
    }
    if !map.is_free(from) {
        return Err(BacktrackError::InvalidStart(from));
    }
    if !field.is_reachable(from) {
        return Err(BacktrackError::Unreachable(from));
    }
    let mut visited = vec![false; map.len()];
    let mut at = from;
    let mut waypoints = vec![at];
    visited[map.index(at)] = true;
    while field.get(at) > T::zero() {
        let here = field.get(at);
        let mut best: Option<(T, Coord)> = None;
        for q in map.moves(at, nb) {
            let dq = field.get(q);
            if !(dq < here) {
                continue;
            }
            let score = dq + Neighborhood::step_cost::<T>(at, q);
            if best.is_none_or(|(s, _)| score < s) {
                best = Some((score, q));
            }
        }
        let Some((_, next)) = best else {
            return Err(BacktrackError::NoDescent(at));
        };
        if std::mem::replace(&mut visited[map.index(next)], true) {
            return Err(BacktrackError::Cycle(next));
        }
        waypoints.push(next);
        at = next;
    }
    Ok(Path::new(waypoints))
}

/// Result of checking an externally supplied field.
#[derive(Debug, Clone, PartialEq)]
pub enum FieldCheck<T> {
    Consistent,
    /// First violating cell in row-major order with the stored and expected values.
    Violation { cell: Coord, found: T, expected: T },
}

/// Checks the fixed-point conditions: leaders at 0, every other free cell at
/// its neighbor minimum within `tol`.
pub fn verify_field<T: Scalar>(
    field: &DistanceField<T>,
    map: &GridMap,
    nb: Neighborhood,
    leaders: &[Coord],
    tol: T,
) -> FieldCheck<T> {
    for p in map.free_cells() {
        let found = field.get(p);
        let expected = if leaders.contains(&p) {
            T::zero()
        } else {
            map.moves(p, nb)
                .map(|q| field.get(q) + Neighborhood::step_cost::<T>(p, q))
                .fold(T::infinity(), T::min)
        };
        let ok = if found.is_finite() && expected.is_finite() {
            (found - expected).abs() <= tol
        } else {
            found == expected
        };
        if !ok {
            return FieldCheck::Violation {
                cell: p,
                found,
                expected,
            };
        }
    }
    FieldCheck::Consistent
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::shortest_path_oracle;

    #[test]
    fn leader_pinned_at_zero() {
        let map = GridMap::from_ascii(&["S..", ".#.", "..T"]).unwrap();
        let net = init_net::<f64>(&map, Neighborhood::Four);
        assert_eq!(net.state().get(map.target()), 0.0);
        assert_eq!(net.leaders().collect::<Vec<_>>(), vec![map.target()]);
        assert_eq!(net.followers().count(), 7);
    }

    #[test]
    fn single_cell_has_no_followers() {
        let map = GridMap::open(1, 1, Coord::new(0, 0), Coord::new(0, 0)).unwrap();
        let mut net = init_net::<f64>(&map, Neighborhood::Eight);
        assert_eq!(net.followers().count(), 0);
        let sol = solve(&mut net, 1);
        assert!(sol.converged);
        assert_eq!(sol.field.get(Coord::new(0, 0)), 0.0);
    }

    #[test]
    fn grid_edge_count() {
        let map = GridMap::open(3, 3, Coord::new(0, 0), Coord::new(2, 2)).unwrap();
        let net = init_net::<f64>(&map, Neighborhood::Four);
        let edges = net.edges();
        assert_eq!(edges.len(), 12);
        assert!(edges.iter().all(|&(_, _, d)| d == 1.0));
        // 12 orthogonal + 2 diagonals per unit square.
        let net8 = init_net::<f64>(&map, Neighborhood::Eight);
        assert_eq!(net8.edges().len(), 20);
    }

    #[test]
    fn line_of_three_by_hand() {
        let map = GridMap::from_ascii(&["T.S"]).unwrap();
        let mut net = init_net::<f64>(&map, Neighborhood::Four);
        let inf = f64::INFINITY;
        assert_eq!(net.sweep(), inf);
        assert_eq!(net.state().values(), &[0.0, 1.0, inf]);
        assert_eq!(net.sweep(), inf);
        assert_eq!(net.state().values(), &[0.0, 1.0, 2.0]);
        assert_eq!(net.sweep(), 0.0);
        assert!(net.is_fixed_point());
    }

    #[test]
    fn isolated_followers_stay_infinite() {
        let map = GridMap::from_ascii(&["S.#.T"]).unwrap();
        let mut net = init_net::<f64>(&map, Neighborhood::Eight);
        let sol = solve(&mut net, 50);
        assert!(sol.converged);
        assert_eq!(sol.field.get(Coord::new(0, 0)), f64::INFINITY);
        assert_eq!(sol.field.get(Coord::new(0, 1)), f64::INFINITY);
        assert_eq!(sol.field.get(Coord::new(0, 3)), 1.0);
    }

    #[test]
    fn small_budget_is_flagged() {
        let map = GridMap::open(1, 6, Coord::new(0, 0), Coord::new(0, 5)).unwrap();
        let mut net = init_net::<f64>(&map, Neighborhood::Four);
        let sol = solve(&mut net, 2);
        assert!(!sol.converged);
        assert_eq!(sol.sweeps, 2);
    }

    #[test]
    fn multiple_leaders() {
        let map = GridMap::open(1, 5, Coord::new(0, 2), Coord::new(0, 0)).unwrap();
        let mut net = init_net_with_leaders::<f64>(&map, Neighborhood::Four, &[Coord::new(0, 0), Coord::new(0, 4)]);
        let sol = solve(&mut net, 10);
        assert_eq!(sol.field.values(), &[0.0, 1.0, 2.0, 1.0, 0.0]);
    }

    #[test]
    fn backtrack_corridor() {
        let map = GridMap::from_ascii(&["T...S"]).unwrap();
        let sol = distance_field::<f64>(&map, Neighborhood::Four);
        let path = backtrack(&sol.field, &map, Neighborhood::Four, map.start()).unwrap();
        let expected: Vec<Coord> = (0..5).rev().map(|c| Coord::new(0, c)).collect();
        assert_eq!(path.waypoints, expected);
        let at_leader = backtrack(&sol.field, &map, Neighborhood::Four, map.target()).unwrap();
        assert_eq!(at_leader.waypoints, vec![map.target()]);
    }

    #[test]
    fn backtrack_steps_equal_distance() {
        let map = GridMap::from_ascii(&[
            "S..#.....",
            ".#.#.###.",
            ".#...#...",
            ".####.#.#",
            "......#.T",
        ])
        .unwrap();
        let sol = distance_field::<f64>(&map, Neighborhood::Four);
        let (oracle, _) = shortest_path_oracle::<f64>(&map, Neighborhood::Four);
        assert_eq!(sol.field, oracle);
        for c in map.free_cells().filter(|&c| sol.field.is_reachable(c)) {
            let p = backtrack(&sol.field, &map, Neighborhood::Four, c).unwrap();
            assert_eq!(p.steps() as f64, sol.field.get(c));
            assert!(p.waypoints.iter().all(|&w| map.is_free(w)));
            assert!(p.waypoints.windows(2).all(|w| sol.field.get(w[1]) < sol.field.get(w[0])));
        }
    }

    #[test]
    fn backtrack_rejects_corrupt_fields() {
        let map = GridMap::from_ascii(&["T.S"]).unwrap();
        let flat = DistanceField::<f64>::from_values(1, 3, vec![0.0, 2.0, 2.0]).unwrap();
        assert_eq!(
            backtrack(&flat, &map, Neighborhood::Four, map.start()),
            Err(BacktrackError::NoDescent(Coord::new(0, 2)))
        );
        let unreachable = DistanceField::<f64>::from_values(1, 3, vec![0.0, 1.0, f64::INFINITY]).unwrap();
        assert_eq!(
            backtrack(&unreachable, &map, Neighborhood::Four, map.start()),
            Err(BacktrackError::Unreachable(map.start()))
        );
    }

    #[test]
    fn verify_reports_first_violation() {
        let map = GridMap::from_ascii(&["T..S"]).unwrap();
        let good = distance_field::<f64>(&map, Neighborhood::Four).field;
        assert_eq!(
            verify_field(&good, &map, Neighborhood::Four, &[map.target()], 1e-9),
            FieldCheck::Consistent
        );
        let bad = DistanceField::<f64>::from_values(1, 4, vec![0.0, 1.0, 3.0, 3.0]).unwrap();
        assert_eq!(
            verify_field(&bad, &map, Neighborhood::Four, &[map.target()], 1e-9),
            FieldCheck::Violation {
                cell: Coord::new(0, 2),
                found: 3.0,
                expected: 2.0
            }
        );
    }
}
