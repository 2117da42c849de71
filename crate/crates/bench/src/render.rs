use gridnav_core::{GridMap, Path};

/// ASCII picture of the map: `#` obstacle, `*` path, `S` start, `T` target
/// (drawn over the path).
pub fn render_map(map: &GridMap, path: Option<&Path>) -> String {
    let mut canvas: Vec<Vec<char>> = (0..map.rows())
        .map(|r| {
            (0..map.cols())
                .map(|c| if map.is_obstacle(gridnav_core::Coord::new(r, c)) { '#' } else { '.' })
                .collect()
        })
        .collect();
    if let Some(path) = path {
        for c in path.iter().filter(|&&c| map.in_bounds(c)) {
            canvas[c.row][c.col] = '*';
        }
    }
    let (s, t) = (map.start(), map.target());
    canvas[s.row][s.col] = 'S';
    canvas[t.row][t.col] = 'T';
    let mut out = String::with_capacity(map.rows() * (map.cols() + 1));
    for row in canvas {
        out.extend(row);
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use gridnav_core::Coord;

    #[test]
    fn markers_take_precedence() {
        let map = GridMap::from_ascii(&["S.#", "..#", "..T"]).unwrap();
        let path: Path = [(0, 0), (1, 1), (2, 2)].into_iter().map(Coord::from).collect();
        assert_eq!(render_map(&map, Some(&path)), "S.#\n.*#\n..T\n");
        assert_eq!(render_map(&map, None), "S.#\n..#\n..T\n");
    }
}
