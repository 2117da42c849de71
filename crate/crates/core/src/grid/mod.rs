//! Occupancy grid world shared by every planner.
//!
//! Cells are addressed by 0-based `(row, col)`. Row 0 is the top line of a
//! scenario file. Continuous-space consumers (the potential field) use
//! `x = col`, `y = row` with cell centers at integer coordinates.

mod field;
mod line;
mod oracle;
mod scenario;

pub use field::{DistanceField, FieldParseError, ParsedField};
pub use line::{polyline_cells, segment_clear, segment_supercover};
pub use oracle::{distances_from, shortest_path_oracle};
pub use scenario::{load_scenario, serialize_scenario, ScenarioConfig, ScenarioError, TrackSample};

use std::fmt;

use thiserror::Error;

use crate::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Coord {
    pub row: usize,
    pub col: usize,
}

impl Coord {
    pub const fn new(row: usize, col: usize) -> Self {
        Self { row, col }
    }

    /// Chebyshev-adjacent and distinct.
    pub fn is_adjacent8(self, other: Coord) -> bool {
        let dr = self.row.abs_diff(other.row);
        let dc = self.col.abs_diff(other.col);
        self != other && dr <= 1 && dc <= 1
    }

    pub fn is_adjacent4(self, other: Coord) -> bool {
        self.row.abs_diff(other.row) + self.col.abs_diff(other.col) == 1
    }

    /// Euclidean distance between cell centers.
    pub fn euclid<T: Scalar>(self, other: Coord) -> T {
        let dr = T::from_count(self.row.abs_diff(other.row));
        let dc = T::from_count(self.col.abs_diff(other.col));
        dr.hypot(dc)
    }

    fn offset(self, dr: isize, dc: isize, rows: usize, cols: usize) -> Option<Coord> {
        let r = self.row.checked_add_signed(dr)?;
        let c = self.col.checked_add_signed(dc)?;
        (r < rows && c < cols).then_some(Coord::new(r, c))
    }
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.row, self.col)
    }
}

impl From<(usize, usize)> for Coord {
    fn from((row, col): (usize, usize)) -> Self {
        Coord::new(row, col)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Cell {
    #[default]
    Free,
    Obstacle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Neighborhood {
    #[default]
    Four,
    Eight,
}

/// N, E, S, W, then NE, SE, SW, NW.
const OFFSETS: [(isize, isize); 8] = [
    (-1, 0),
    (0, 1),
    (1, 0),
    (0, -1),
    (-1, 1),
    (1, 1),
    (1, -1),
    (-1, -1),
];

impl Neighborhood {
    pub fn max_neighbors(self) -> usize {
        match self {
            Neighborhood::Four => 4,
            Neighborhood::Eight => 8,
        }
    }

    fn offsets(self) -> &'static [(isize, isize)] {
        &OFFSETS[..self.max_neighbors()]
    }

    /// 1 for an orthogonal step, √2 for a diagonal one. Callers guarantee adjacency.
    pub fn step_cost<T: Scalar>(a: Coord, b: Coord) -> T {
        if a.row != b.row && a.col != b.col {
            T::lit(std::f64::consts::SQRT_2)
        } else {
            T::one()
        }
    }

    pub fn admits_step(self, a: Coord, b: Coord) -> bool {
        match self {
            Neighborhood::Four => a.is_adjacent4(b),
            Neighborhood::Eight => a.is_adjacent8(b),
        }
    }
}

impl fmt::Display for Neighborhood {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Neighborhood::Four => "four",
            Neighborhood::Eight => "eight",
        })
    }
}

impl std::str::FromStr for Neighborhood {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "four" | "4" => Ok(Neighborhood::Four),
            "eight" | "8" => Ok(Neighborhood::Eight),
            other => Err(format!("unknown neighborhood `{other}`")),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GridError {
    #[error("grid must have at least one row and one column")]
    Empty,
    #[error("expected {expected} cells, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("{what} {coord} is outside the {rows}x{cols} grid")]
    OutOfBounds {
        what: &'static str,
        coord: Coord,
        rows: usize,
        cols: usize,
    },
    #[error("{what} {coord} is an obstacle")]
    Blocked { what: &'static str, coord: Coord },
    #[error("waypoints {index} and {next} ({a} -> {b}) are not adjacent")]
    NonAdjacent {
        index: usize,
        next: usize,
        a: Coord,
        b: Coord,
    },
}

/// Rectangular occupancy grid with a start and a target cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridMap {
    rows: usize,
    cols: usize,
    cells: Vec<Cell>,
    start: Coord,
    target: Coord,
}

impl GridMap {
    pub fn new(
        rows: usize,
        cols: usize,
        cells: Vec<Cell>,
        start: Coord,
        target: Coord,
    ) -> Result<Self, GridError> {
        if rows == 0 || cols == 0 {
            return Err(GridError::Empty);
        }
        if cells.len() != rows * cols {
            return Err(GridError::DimensionMismatch {
                expected: rows * cols,
                actual: cells.len(),
            });
        }
        let map = Self {
            rows,
            cols,
            cells,
            start,
            target,
        };
        for (what, c) in [("start", start), ("target", target)] {
            if !map.in_bounds(c) {
                return Err(GridError::OutOfBounds {
                    what,
                    coord: c,
                    rows,
                    cols,
                });
            }
            if map.is_obstacle(c) {
                return Err(GridError::Blocked { what, coord: c });
            }
        }
        Ok(map)
    }

    /// All-free grid.
    pub fn open(rows: usize, cols: usize, start: Coord, target: Coord) -> Result<Self, GridError> {
        Self::new(rows, cols, vec![Cell::Free; rows * cols], start, target)
    }

    /// Builds a map from `.`/`#`/`S`/`T` rows. Convenient in tests.
    pub fn from_ascii(rows: &[&str]) -> Result<Self, ScenarioError> {
        let mut text = format!("{} {}\n", rows.len(), rows.first().map_or(0, |r| r.len()));
        for r in rows {
            text.push_str(r);
            text.push('\n');
        }
        load_scenario::<f64>(&text).map(|s| s.map)
    }

    /// Returns a copy with the given cells turned into obstacles.
    pub fn with_obstacles(&self, obstacles: impl IntoIterator<Item = Coord>) -> Result<Self, GridError> {
        let mut cells = self.cells.clone();
        for c in obstacles {
            if !self.in_bounds(c) {
                return Err(GridError::OutOfBounds {
                    what: "obstacle",
                    coord: c,
                    rows: self.rows,
                    cols: self.cols,
                });
            }
            cells[c.row * self.cols + c.col] = Cell::Obstacle;
        }
        Self::new(self.rows, self.cols, cells, self.start, self.target)
    }

    pub fn with_endpoints(&self, start: Coord, target: Coord) -> Result<Self, GridError> {
        Self::new(self.rows, self.cols, self.cells.clone(), start, target)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn start(&self) -> Coord {
        self.start
    }

    pub fn target(&self) -> Coord {
        self.target
    }

    pub fn in_bounds(&self, c: Coord) -> bool {
        c.row < self.rows && c.col < self.cols
    }

    #[inline]
    pub fn index(&self, c: Coord) -> usize {
        debug_assert!(self.in_bounds(c));
        c.row * self.cols + c.col
    }

    #[inline]
    pub fn coord(&self, index: usize) -> Coord {
        Coord::new(index / self.cols, index % self.cols)
    }

    pub fn cell(&self, c: Coord) -> Cell {
        self.cells[self.index(c)]
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn is_free(&self, c: Coord) -> bool {
        self.in_bounds(c) && self.cells[self.index(c)] == Cell::Free
    }

    pub fn is_obstacle(&self, c: Coord) -> bool {
        self.cells[self.index(c)] == Cell::Obstacle
    }

    pub fn obstacle_count(&self) -> usize {
        self.cells.iter().filter(|&&c| c == Cell::Obstacle).count()
    }

    pub fn coords(&self) -> impl Iterator<Item = Coord> + '_ {
        (0..self.len()).map(|i| self.coord(i))
    }

    pub fn free_cells(&self) -> impl Iterator<Item = Coord> + '_ {
        self.coords().filter(|&c| !self.is_obstacle(c))
    }

    /// In-bounds neighbors of `c` in canonical order, obstacles included.
    pub fn neighbors(&self, c: Coord, nb: Neighborhood) -> impl Iterator<Item = Coord> + '_ {
        let (rows, cols) = (self.rows, self.cols);
        nb.offsets()
            .iter()
            .filter_map(move |&(dr, dc)| c.offset(dr, dc, rows, cols))
    }

    /// Neighbors the robot can actually step to: free, and for diagonal
    /// steps both orthogonal side cells free as well (no corner cutting).
    pub fn moves(&self, c: Coord, nb: Neighborhood) -> impl Iterator<Item = Coord> + '_ {
        self.neighbors(c, nb).filter(move |&n| self.can_step(c, n))
    }

    /// Whether a single adjacent step `a -> b` is passable.
    pub fn can_step(&self, a: Coord, b: Coord) -> bool {
        if !self.is_free(a) || !self.is_free(b) || !a.is_adjacent8(b) {
            return false;
        }
        if a.row != b.row && a.col != b.col {
            self.is_free(Coord::new(a.row, b.col)) && self.is_free(Coord::new(b.row, a.col))
        } else {
            true
        }
    }
}

/// In-bounds neighbors of `c` in canonical order.
pub fn neighbors(map: &GridMap, c: Coord, nb: Neighborhood) -> Vec<Coord> {
    map.neighbors(c, nb).collect()
}

/// Ordered cell sequence.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Path {
    pub waypoints: Vec<Coord>,
}

impl Path {
    pub fn new(waypoints: Vec<Coord>) -> Self {
        Self { waypoints }
    }

    pub fn single(c: Coord) -> Self {
        Self { waypoints: vec![c] }
    }

    pub fn len(&self) -> usize {
        self.waypoints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.waypoints.is_empty()
    }

    pub fn first(&self) -> Option<Coord> {
        self.waypoints.first().copied()
    }

    pub fn last(&self) -> Option<Coord> {
        self.waypoints.last().copied()
    }

    pub fn steps(&self) -> usize {
        self.waypoints.len().saturating_sub(1)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Coord> {
        self.waypoints.iter()
    }

    /// Whether the path joins the map's start to its target through passable steps.
    pub fn is_valid_on(&self, map: &GridMap, nb: Neighborhood) -> bool {
        self.first() == Some(map.start())
            && self.last() == Some(map.target())
            && self.waypoints.iter().all(|&c| map.is_free(c))
            && self
                .waypoints
                .windows(2)
                .all(|w| nb.admits_step(w[0], w[1]) && map.can_step(w[0], w[1]))
    }
}

impl FromIterator<Coord> for Path {
    fn from_iter<I: IntoIterator<Item = Coord>>(iter: I) -> Self {
        Self::new(iter.into_iter().collect())
    }
}

/// Sum of step costs: 1 per orthogonal step, √2 per diagonal one.
pub fn path_length<T: Scalar>(path: &Path, nb: Neighborhood) -> Result<T, GridError> {
    let mut total = T::zero();
    for (i, w) in path.waypoints.windows(2).enumerate() {
        if !nb.admits_step(w[0], w[1]) {
            return Err(GridError::NonAdjacent {
                index: i,
                next: i + 1,
                a: w[0],
                b: w[1],
            });
        }
        total += Neighborhood::step_cost::<T>(w[0], w[1]);
    }
    Ok(total)
}

/// Euclidean length of a polyline through cell centers.
pub fn polyline_length<T: Scalar>(waypoints: &[Coord]) -> T {
    waypoints
        .windows(2)
        .fold(T::zero(), |acc, w| acc + w[0].euclid::<T>(w[1]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn open(rows: usize, cols: usize) -> GridMap {
        GridMap::open(rows, cols, Coord::new(0, 0), Coord::new(rows - 1, cols - 1)).unwrap()
    }

    #[test]
    fn neighbor_counts() {
        let m = open(5, 5);
        assert_eq!(neighbors(&m, Coord::new(2, 2), Neighborhood::Four).len(), 4);
        assert_eq!(neighbors(&m, Coord::new(2, 2), Neighborhood::Eight).len(), 8);
        assert_eq!(neighbors(&m, Coord::new(0, 0), Neighborhood::Four).len(), 2);
        assert_eq!(neighbors(&m, Coord::new(0, 0), Neighborhood::Eight).len(), 3);
    }

    #[test]
    fn neighbor_order_is_canonical() {
        let m = open(3, 3);
        let got = neighbors(&m, Coord::new(1, 1), Neighborhood::Eight);
        let want = [(0, 1), (1, 2), (2, 1), (1, 0), (0, 2), (2, 2), (2, 0), (0, 0)]
            .map(Coord::from)
            .to_vec();
        assert_eq!(got, want);
    }

    #[test]
    fn corner_cutting_is_refused() {
        let m = GridMap::from_ascii(&["S#", ".T"]).unwrap();
        assert!(!m.can_step(Coord::new(0, 0), Coord::new(1, 1)));
        assert!(m.can_step(Coord::new(0, 0), Coord::new(1, 0)));
        let moves: Vec<_> = m.moves(Coord::new(0, 0), Neighborhood::Eight).collect();
        assert_eq!(moves, vec![Coord::new(1, 0)]);
    }

    #[test]
    fn path_lengths() {
        let single = Path::single(Coord::new(1, 1));
        assert_eq!(path_length::<f64>(&single, Neighborhood::Four).unwrap(), 0.0);

        let straight: Path = (0..6).map(|c| Coord::new(0, c)).collect();
        assert_eq!(path_length::<f64>(&straight, Neighborhood::Four).unwrap(), 5.0);

        let mixed = Path::new(vec![
            Coord::new(0, 0),
            Coord::new(0, 1),
            Coord::new(0, 2),
            Coord::new(1, 3),
        ]);
        let len: f64 = path_length(&mixed, Neighborhood::Eight).unwrap();
        assert!((len - (2.0 + 2f64.sqrt())).abs() < 1e-12);
        assert!(matches!(
            path_length::<f64>(&mixed, Neighborhood::Four),
            Err(GridError::NonAdjacent { index: 2, .. })
        ));

        let jump = Path::new(vec![Coord::new(0, 0), Coord::new(0, 2)]);
        assert!(path_length::<f64>(&jump, Neighborhood::Eight).is_err());
    }

    #[test]
    fn construction_errors() {
        assert_eq!(GridMap::open(0, 3, Coord::new(0, 0), Coord::new(0, 0)), Err(GridError::Empty));
        assert!(matches!(
            GridMap::new(2, 2, vec![Cell::Free; 3], Coord::new(0, 0), Coord::new(1, 1)),
            Err(GridError::DimensionMismatch { expected: 4, actual: 3 })
        ));
        assert!(matches!(
            GridMap::open(2, 2, Coord::new(0, 0), Coord::new(2, 0)),
            Err(GridError::OutOfBounds { what: "target", .. })
        ));
        let m = open(3, 3);
        assert!(matches!(
            m.with_obstacles([Coord::new(0, 0)]),
            Err(GridError::Blocked { what: "start", .. })
        ));
    }
}
