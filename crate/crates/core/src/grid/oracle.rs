//! Exact single-source shortest paths: BFS for unit-cost 4-connectivity,
//! Dijkstra for 8-connectivity with √2 diagonals. Used as the reference
//! every planner is checked against.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};

use super::{Coord, DistanceField, GridMap, Neighborhood, Path};
use crate::Scalar;

struct Entry<T> {
    dist: T,
    index: usize,
}

impl<T: Scalar> PartialEq for Entry<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<T: Scalar> Eq for Entry<T> {}
impl<T: Scalar> PartialOrd for Entry<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T: Scalar> Ord for Entry<T> {
    // Min-heap on distance, ties by index for determinism.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .partial_cmp(&self.dist)
            .unwrap_or(Ordering::Equal)
            .then_with(|| other.index.cmp(&self.index))
    }
}

/// Distances from a set of source cells plus a parent table pointing one step
/// closer to the nearest source (`usize::MAX` for sources and unreachable cells).
pub fn distances_from<T: Scalar>(
    map: &GridMap,
    nb: Neighborhood,
    sources: &[Coord],
) -> (DistanceField<T>, Vec<usize>) {
    let mut field = DistanceField::unreachable(map.rows(), map.cols());
    let mut parent = vec![usize::MAX; map.len()];
    match nb {
        Neighborhood::Four => {
            let mut queue = VecDeque::new();
            for &s in sources.iter().filter(|&&s| map.is_free(s)) {
                if !field.is_reachable(s) {
                    field.set(s, T::zero());
                    queue.push_back(s);
                }
            }
            while let Some(c) = queue.pop_front() {
                let next = field.get(c) + T::one();
                for n in map.moves(c, nb) {
                    if !field.is_reachable(n) {
                        field.set(n, next);
                        parent[map.index(n)] = map.index(c);
                        queue.push_back(n);
                    }
                }
            }
        }
        Neighborhood::Eight => {
            let mut heap = BinaryHeap::new();
            for &s in sources.iter().filter(|&&s| map.is_free(s)) {
                field.set(s, T::zero());
                heap.push(Entry {
                    dist: T::zero(),
                    index: map.index(s),
                });
            }
            while let Some(Entry { dist, index }) = heap.pop() {
                let c = map.coord(index);
                if dist > field.get(c) {
                    continue;
                }
                for n in map.moves(c, nb) {
                    let cand = dist + Neighborhood::step_cost::<T>(c, n);
                    if cand < field.get(n) {
                        field.set(n, cand);
                        parent[map.index(n)] = index;
                        heap.push(Entry {
                            dist: cand,
                            index: map.index(n),
                        });
                    }
                }
            }
        }
    }
    (field, parent)
}

/// Distances from the map's target, and an optimal start→target path when
/// the start is reachable.
pub fn shortest_path_oracle<T: Scalar>(
    map: &GridMap,
    nb: Neighborhood,
) -> (DistanceField<T>, Option<Path>) {
    let (field, parent) = distances_from::<T>(map, nb, &[map.target()]);
    if !field.is_reachable(map.start()) {
        return (field, None);
    }
    let mut waypoints = vec![map.start()];
    let mut at = map.index(map.start());
    while parent[at] != usize::MAX {
        at = parent[at];
        waypoints.push(map.coord(at));
    }
    (field, Some(Path::new(waypoints)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::path_length;

    #[test]
    fn strip_distances() {
        let map = GridMap::from_ascii(&["T.S"]).unwrap();
        let (f, path) = shortest_path_oracle::<f64>(&map, Neighborhood::Four);
        assert_eq!(f.values(), &[0.0, 1.0, 2.0]);
        let path = path.unwrap();
        assert_eq!(path.first(), Some(Coord::new(0, 2)));
        assert_eq!(path.last(), Some(Coord::new(0, 0)));
    }

    #[test]
    fn walled_off_start() {
        let map = GridMap::from_ascii(&["S#.", "##.", "..T"]).unwrap();
        let (f, path) = shortest_path_oracle::<f64>(&map, Neighborhood::Eight);
        assert!(path.is_none());
        assert_eq!(f.get(map.start()), f64::INFINITY);
        assert_eq!(f.get(map.target()), 0.0);
    }

    #[test]
    fn eight_uses_diagonals() {
        let map = GridMap::open(4, 4, Coord::new(0, 0), Coord::new(3, 3)).unwrap();
        let (f, path) = shortest_path_oracle::<f64>(&map, Neighborhood::Eight);
        assert!((f.get(map.start()) - 3.0 * 2f64.sqrt()).abs() < 1e-12);
        let path = path.unwrap();
        assert!(path.is_valid_on(&map, Neighborhood::Eight));
        let len: f64 = path_length(&path, Neighborhood::Eight).unwrap();
        assert!((len - f.get(map.start())).abs() < 1e-12);
    }

    #[test]
    fn local_consistency_on_a_maze() {
        let map = GridMap::from_ascii(&[
            "S...#....",
            ".##.#.##.",
            ".#..#..#.",
            ".#.###.#.",
            ".......#T",
        ])
        .unwrap();
        for nb in [Neighborhood::Four, Neighborhood::Eight] {
            let (f, path) = shortest_path_oracle::<f64>(&map, nb);
            for c in map.free_cells() {
                if c == map.target() {
                    assert_eq!(f.get(c), 0.0);
                    continue;
                }
                let best = map
                    .moves(c, nb)
                    .map(|n| f.get(n) + Neighborhood::step_cost::<f64>(c, n))
                    .fold(f64::INFINITY, f64::min);
                assert!((f.get(c) - best).abs() < 1e-9 || (f.get(c).is_infinite() && best.is_infinite()));
            }
            let path = path.unwrap();
            assert!(path.is_valid_on(&map, nb));
            let len: f64 = path_length(&path, nb).unwrap();
            assert!((len - f.get(map.start())).abs() < 1e-9);
        }
    }
}
