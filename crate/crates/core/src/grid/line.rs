//! Straight segments between cell centers.

use super::{Coord, GridMap};

/// Every cell the segment between the two cell centers touches. Where the
/// segment passes exactly through a cell corner both side cells are included,
/// so a clear segment never squeezes between diagonally touching obstacles.
pub fn segment_supercover(a: Coord, b: Coord) -> Vec<Coord> {
    walk(a, b, true)
}

/// Whether the straight segment `a -> b` touches only free cells.
pub fn segment_clear(map: &GridMap, a: Coord, b: Coord) -> bool {
    if !map.is_free(a) || !map.is_free(b) {
        return false;
    }
    walk_until(a, b, true, |c| map.is_free(c))
}

/// Rasterizes a polyline into an 8-connected cell walk without repeats of
/// consecutive cells.
pub fn polyline_cells(waypoints: &[Coord]) -> Vec<Coord> {
    let mut out: Vec<Coord> = Vec::new();
    for w in waypoints.windows(2) {
        for c in walk(w[0], w[1], false) {
            if out.last() != Some(&c) {
                out.push(c);
            }
        }
    }
    if out.is_empty() {
        out.extend(waypoints.first());
    }
    out
}

fn walk(a: Coord, b: Coord, supercover: bool) -> Vec<Coord> {
    let mut cells = Vec::new();
    walk_until(a, b, supercover, |c| {
        cells.push(c);
        true
    });
    cells
}

/// Visits cells in order until `visit` returns false. Returns whether the
/// walk completed.
fn walk_until(a: Coord, b: Coord, supercover: bool, mut visit: impl FnMut(Coord) -> bool) -> bool {
    let (mut x, mut y) = (a.col as i64, a.row as i64);
    let dx = b.col as i64 - x;
    let dy = b.row as i64 - y;
    let (nx, ny) = (dx.abs(), dy.abs());
    let (sx, sy) = (dx.signum(), dy.signum());
    let at = |x: i64, y: i64| Coord::new(y as usize, x as usize);
    if !visit(at(x, y)) {
        return false;
    }
    let (mut ix, mut iy) = (0i64, 0i64);
    while ix < nx || iy < ny {
        let decision = (1 + 2 * ix) * ny - (1 + 2 * iy) * nx;
        if decision == 0 {
            if supercover && !(visit(at(x + sx, y)) && visit(at(x, y + sy))) {
                return false;
            }
            x += sx;
            y += sy;
            ix += 1;
            iy += 1;
        } else if decision < 0 {
            x += sx;
            ix += 1;
        } else {
            y += sy;
            iy += 1;
        }
        if !visit(at(x, y)) {
            return false;
        }
    }
    true
}
