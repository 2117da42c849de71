use thiserror::Error;

use super::{Coord, GridMap};
use crate::numfmt::sig6;
use crate::Scalar;

/// Per-cell distance to the nearest source; `+inf` marks unreachable cells.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceField<T> {
    rows: usize,
    cols: usize,
    values: Vec<T>,
}

impl<T: Scalar> DistanceField<T> {
    pub fn filled(rows: usize, cols: usize, value: T) -> Self {
        Self {
            rows,
            cols,
            values: vec![value; rows * cols],
        }
    }

    pub fn unreachable(rows: usize, cols: usize) -> Self {
        Self::filled(rows, cols, T::infinity())
    }

    pub fn from_values(rows: usize, cols: usize, values: Vec<T>) -> Option<Self> {
        (values.len() == rows * cols).then_some(Self { rows, cols, values })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, c: Coord) -> T {
        self.values[c.row * self.cols + c.col]
    }

    #[inline]
    pub fn set(&mut self, c: Coord, v: T) {
        self.values[c.row * self.cols + c.col] = v;
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn is_reachable(&self, c: Coord) -> bool {
        self.get(c).is_finite()
    }

    pub fn matches_map(&self, map: &GridMap) -> bool {
        self.rows == map.rows() && self.cols == map.cols()
    }

    /// Largest absolute element-wise difference; infinities must coincide.
    pub fn max_abs_diff(&self, other: &Self) -> Option<T> {
        if self.rows != other.rows || self.cols != other.cols {
            return None;
        }
        let mut worst = T::zero();
        for (&a, &b) in self.values.iter().zip(&other.values) {
            match (a.is_finite(), b.is_finite()) {
                (true, true) => worst = worst.max((a - b).abs()),
                (false, false) if a == b => {}
                _ => return Some(T::infinity()),
            }
        }
        Some(worst)
    }

    /// Matrix dump: one line per row, obstacles as `-1`, unreachable as `inf`.
    /// Integral fields print as integers, others at 6 significant digits.
    pub fn to_table(&self, map: &GridMap) -> String {
        let mut out = String::new();
        for r in 0..self.rows {
            let line: Vec<String> = (0..self.cols)
                .map(|c| {
                    let here = Coord::new(r, c);
                    if map.in_bounds(here) && map.is_obstacle(here) {
                        "-1".to_string()
                    } else {
                        sig6(self.get(here).to_f64_lossy())
                    }
                })
                .collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    /// Parses a matrix dump. `-1` entries become obstacle marks; `inf`
    /// entries are unreachable.
    pub fn parse_table(text: &str) -> Result<ParsedField<T>, FieldParseError> {
        let mut values = Vec::new();
        let mut obstacles = Vec::new();
        let mut cols = None;
        let mut rows = 0;
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut n = 0;
            for tok in line.split_whitespace() {
                let v: f64 = tok.parse().map_err(|_| FieldParseError::BadNumber {
                    line: i + 1,
                    token: tok.to_string(),
                })?;
                if v == -1.0 {
                    obstacles.push(Coord::new(rows, n));
                    values.push(T::infinity());
                } else if v < 0.0 || v.is_nan() {
                    return Err(FieldParseError::BadNumber {
                        line: i + 1,
                        token: tok.to_string(),
                    });
                } else {
                    values.push(T::lit(v));
                }
                n += 1;
            }
            match cols {
                None => cols = Some(n),
                Some(expected) if expected != n => {
                    return Err(FieldParseError::Ragged {
                        line: i + 1,
                        expected,
                        found: n,
                    })
                }
                _ => {}
            }
            rows += 1;
        }
        let cols = cols.ok_or(FieldParseError::Empty)?;
        Ok(ParsedField {
            field: DistanceField { rows, cols, values },
            obstacles,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParsedField<T> {
    pub field: DistanceField<T>,
    /// Cells written as `-1`.
    pub obstacles: Vec<Coord>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldParseError {
    #[error("field dump is empty")]
    Empty,
    #[error("line {line}: `{token}` is not a distance, -1 or inf")]
    BadNumber { line: usize, token: String },
    #[error("line {line}: expected {expected} values, found {found}")]
    Ragged {
        line: usize,
        expected: usize,
        found: usize,
    },
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dump_and_parse() {
        let map = GridMap::from_ascii(&["S#.", "..T"]).unwrap();
        let mut f = DistanceField::<f64>::unreachable(2, 3);
        f.set(Coord::new(0, 0), 0.0);
        f.set(Coord::new(1, 0), 1.0);
        f.set(Coord::new(1, 1), 2.0);
        f.set(Coord::new(1, 2), 2.0 + 2f64.sqrt());
        let text = f.to_table(&map);
        assert_eq!(text, "0 -1 inf\n1 2 3.41421\n");
        let parsed = DistanceField::<f64>::parse_table(&text).unwrap();
        assert_eq!(parsed.obstacles, vec![Coord::new(0, 1)]);
        assert_eq!(parsed.field.get(Coord::new(1, 1)), 2.0);
        assert!(!parsed.field.is_reachable(Coord::new(0, 2)));
    }

    #[test]
    fn parse_errors() {
        assert_eq!(DistanceField::<f64>::parse_table(""), Err(FieldParseError::Empty));
        assert!(matches!(
            DistanceField::<f64>::parse_table("1 2\n3\n"),
            Err(FieldParseError::Ragged { line: 2, .. })
        ));
        assert!(matches!(
            DistanceField::<f64>::parse_table("1 -3\n"),
            Err(FieldParseError::BadNumber { line: 1, .. })
        ));
    }

    #[test]
    fn diff_requires_matching_infinities() {
        let a = DistanceField::<f64>::from_values(1, 2, vec![0.0, f64::INFINITY]).unwrap();
        let b = DistanceField::<f64>::from_values(1, 2, vec![0.5, f64::INFINITY]).unwrap();
        let c = DistanceField::<f64>::from_values(1, 2, vec![0.0, 3.0]).unwrap();
        assert_eq!(a.max_abs_diff(&b), Some(0.5));
        assert_eq!(a.max_abs_diff(&c), Some(f64::INFINITY));
    }
}
