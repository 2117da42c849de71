//! Initial solutions built from exact shortest paths through a random via
//! cell, and helpers for resampling waypoints along cell paths.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};

use rand::Rng;

use crate::grid::{distances_from, segment_clear, Coord, GridMap, Neighborhood};

fn follow(map: &GridMap, parents: &[usize], from: Coord) -> Vec<Coord> {
    let mut out = vec![from];
    let mut at = map.index(from);
    while parents[at] != usize::MAX {
        at = parents[at];
        out.push(map.coord(at));
    }
    out
}

/// Cell path `a ..= b` along an exact 8-connected shortest path, or `None`
/// when `b` is unreachable from `a`. A* under the octile distance.
pub fn shortest_cells(map: &GridMap, a: Coord, b: Coord) -> Option<Vec<Coord>> {
    if !map.is_free(a) || !map.is_free(b) {
        return None;
    }
    let octile = |c: Coord| {
        let dr = c.row.abs_diff(b.row) as f64;
        let dc = c.col.abs_diff(b.col) as f64;
        dr.max(dc) + (std::f64::consts::SQRT_2 - 1.0) * dr.min(dc)
    };
    let mut g = vec![f64::INFINITY; map.len()];
    let mut parent = vec![usize::MAX; map.len()];
    let mut closed = vec![false; map.len()];
    let mut open = BinaryHeap::new();
    g[map.index(a)] = 0.0;
    open.push(Open { f: octile(a), index: map.index(a) });
    while let Some(Open { index, .. }) = open.pop() {
        if std::mem::replace(&mut closed[index], true) {
            continue;
        }
        let c = map.coord(index);
        if c == b {
            let mut p = follow(map, &parent, b);
            p.reverse();
            return Some(p);
        }
        for n in map.moves(c, Neighborhood::Eight) {
            let ni = map.index(n);
            let cand = g[index] + Neighborhood::step_cost::<f64>(c, n);
            if cand < g[ni] {
                g[ni] = cand;
                parent[ni] = index;
                open.push(Open { f: cand + octile(n), index: ni });
            }
        }
    }
    None
}

struct Open {
    f: f64,
    index: usize,
}

impl PartialEq for Open {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Open {}
impl PartialOrd for Open {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Open {
    fn cmp(&self, other: &Self) -> Ordering {
        other.f.total_cmp(&self.f).then_with(|| other.index.cmp(&self.index))
    }
}

/// Cuts out every revisit so each cell appears at most once.
pub fn remove_loops(path: &[Coord]) -> Vec<Coord> {
    let mut out: Vec<Coord> = Vec::with_capacity(path.len());
    for &c in path {
        if let Some(k) = out.iter().position(|&x| x == c) {
            out.truncate(k + 1);
        } else {
            out.push(c);
        }
    }
    out
}

/// `k` interior cells spread evenly along `path` (endpoints excluded).
/// Requires `path.len() >= k + 2` for the samples to be distinct.
pub fn sample_interior(path: &[Coord], k: usize) -> Vec<Coord> {
    let last = path.len() - 1;
    (1..=k)
        .map(|i| path[((i * last) as f64 / (k + 1) as f64).round() as usize])
        .collect()
}

/// Indices of a short chain of `path` cells, both ends included, in which
/// each cell sees the next along a clear straight segment. Each link reaches
/// the farthest visible cell.
pub fn line_of_sight_chain(map: &GridMap, path: &[Coord]) -> Vec<usize> {
    let mut chain = vec![0];
    let mut i = 0;
    while i + 1 < path.len() {
        i = (i + 1..path.len())
            .rev()
            .find(|&j| segment_clear(map, path[i], path[j]))
            .unwrap_or(i + 1);
        chain.push(i);
    }
    chain
}

/// `k` interior waypoints along `path` that form a clear polyline whenever
/// `k` is at least the number of corners the path needs. Spare waypoints
/// split the longest links; with too few, the cells are spread evenly.
pub fn clear_waypoints(map: &GridMap, path: &[Coord], k: usize) -> Vec<Coord> {
    let mut chain = line_of_sight_chain(map, path);
    if chain.len() > k + 2 {
        return sample_interior(path, k);
    }
    while chain.len() < k + 2 {
        let Some(t) = (0..chain.len() - 1)
            .filter(|&t| chain[t + 1] - chain[t] >= 2)
            .max_by_key(|&t| (chain[t + 1] - chain[t], std::cmp::Reverse(t)))
        else {
            break;
        };
        chain.insert(t + 1, (chain[t] + chain[t + 1]) / 2);
    }
    chain[1..chain.len() - 1].iter().map(|&i| path[i]).collect()
}

/// Fewest cells on any 8-connected start-to-target path.
pub fn min_cells(map: &GridMap) -> Option<usize> {
    let mut hops = vec![usize::MAX; map.len()];
    let mut queue = VecDeque::new();
    hops[map.index(map.start())] = 1;
    queue.push_back(map.start());
    while let Some(c) = queue.pop_front() {
        if c == map.target() {
            return Some(hops[map.index(c)]);
        }
        let h = hops[map.index(c)] + 1;
        for n in map.moves(c, Neighborhood::Eight) {
            if hops[map.index(n)] == usize::MAX {
                hops[map.index(n)] = h;
                queue.push_back(n);
            }
        }
    }
    None
}

/// Shortest-path trees rooted at the start and the target.
pub struct Stitcher<'a> {
    map: &'a GridMap,
    to_start: Vec<usize>,
    to_target: Vec<usize>,
    candidates: Vec<Coord>,
}

impl<'a> Stitcher<'a> {
    pub fn new(map: &'a GridMap) -> Self {
        let (from_start, to_start) = distances_from::<f64>(map, Neighborhood::Eight, &[map.start()]);
        let (_, to_target) = distances_from::<f64>(map, Neighborhood::Eight, &[map.target()]);
        let candidates = map.free_cells().filter(|&c| from_start.is_reachable(c)).collect();
        Self {
            map,
            to_start,
            to_target,
            candidates,
        }
    }

    pub fn candidates(&self) -> &[Coord] {
        &self.candidates
    }

    /// Loop-free start-to-target cell path through `via`.
    pub fn through(&self, via: Coord) -> Vec<Coord> {
        let mut path = follow(self.map, &self.to_start, via);
        path.reverse();
        path.extend(follow(self.map, &self.to_target, via).into_iter().skip(1));
        remove_loops(&path)
    }

    pub fn random_path<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<Coord> {
        let via = self.candidates[rng.random_range(0..self.candidates.len())];
        self.through(via)
    }
}
