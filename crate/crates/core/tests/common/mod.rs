#![allow(dead_code)]

use gridnav_core::{Cell, Coord, GridMap};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random map with the given obstacle density; start and target are free.
pub fn random_map(rows: usize, cols: usize, density: f64, seed: u64) -> GridMap {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cells: Vec<Cell> = (0..rows * cols)
        .map(|_| if rng.random::<f64>() < density { Cell::Obstacle } else { Cell::Free })
        .collect();
    let start = Coord::new(rng.random_range(0..rows), rng.random_range(0..cols));
    let target = Coord::new(rng.random_range(0..rows), rng.random_range(0..cols));
    cells[start.row * cols + start.col] = Cell::Free;
    cells[target.row * cols + target.col] = Cell::Free;
    GridMap::new(rows, cols, cells, start, target).unwrap()
}

pub fn arb_map(max_side: usize) -> impl Strategy<Value = GridMap> {
    (1..=max_side, 1..=max_side, 0.0..0.45f64, any::<u64>())
        .prop_map(|(r, c, d, s)| random_map(r, c, d, s))
}
