use std::fmt::Write as _;

use thiserror::Error;

use super::{Cell, Coord, GridMap, Neighborhood};
use crate::Scalar;

/// One sample of a moving-target track. `x` runs along columns, `y` along rows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackSample<T> {
    pub x: T,
    pub y: T,
    pub t: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig<T = f64> {
    pub map: GridMap,
    pub neighborhood: Neighborhood,
    pub track: Option<Vec<TrackSample<T>>>,
}

impl<T: Scalar> ScenarioConfig<T> {
    pub fn new(map: GridMap) -> Self {
        Self {
            map,
            neighborhood: Neighborhood::Four,
            track: None,
        }
    }

    pub fn with_neighborhood(mut self, nb: Neighborhood) -> Self {
        self.neighborhood = nb;
        self
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScenarioError {
    #[error("line {line}: missing `rows cols` header")]
    MissingHeader { line: usize },
    #[error("line {line}: malformed header `{text}`")]
    BadHeader { line: usize, text: String },
    #[error("line {line}: expected {expected} columns, found {found}")]
    RowWidth {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: unexpected character `{ch}` in grid row")]
    BadCell { line: usize, ch: char },
    #[error("line {line}: expected {expected} grid rows, found {found}")]
    MissingRows {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: duplicate {marker} marker (first at line {first})")]
    DuplicateMarker {
        line: usize,
        marker: char,
        first: usize,
    },
    #[error("line {line}: no {marker} marker in grid")]
    MissingMarker { line: usize, marker: char },
    #[error("line {line}: malformed track `{text}`")]
    BadTrack { line: usize, text: String },
    #[error("line {line}: track timestamps must be strictly increasing")]
    TrackOrder { line: usize },
    #[error("line {line}: unrecognised trailing line `{text}`")]
    Trailing { line: usize, text: String },
    #[error("line {line}: {message}")]
    Invalid { line: usize, message: String },
}

/// Parses the scenario text format.
///
/// ```text
/// # optional comment lines before the header
/// 3 4
/// S..#
/// .#..
/// ...T
/// neighborhood: eight          (optional, default four)
/// track: 3,2,0; 3,1,5          (optional moving-target samples x,y,t)
/// ```
pub fn load_scenario<T: Scalar>(text: &str) -> Result<ScenarioConfig<T>, ScenarioError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim_end_matches('\r')));

    let (header_line, header) = loop {
        match lines.next() {
            None => return Err(ScenarioError::MissingHeader { line: 1 }),
            Some((_, l)) if l.trim().is_empty() || l.starts_with('#') => continue,
            Some(found) => break found,
        }
    };
    let dims: Vec<usize> = header
        .split_whitespace()
        .map(str::parse)
        .collect::<Result<_, _>>()
        .map_err(|_| ScenarioError::BadHeader {
            line: header_line,
            text: header.to_string(),
        })?;
    let [rows, cols] = dims[..] else {
        return Err(ScenarioError::BadHeader {
            line: header_line,
            text: header.to_string(),
        });
    };
    if rows == 0 || cols == 0 {
        return Err(ScenarioError::BadHeader {
            line: header_line,
            text: header.to_string(),
        });
    }

    let mut cells = Vec::with_capacity(rows * cols);
    let mut start: Option<(Coord, usize)> = None;
    let mut target: Option<(Coord, usize)> = None;
    let mut last_line = header_line;
    for r in 0..rows {
        let Some((line, row_text)) = lines.next() else {
            return Err(ScenarioError::MissingRows {
                line: last_line + 1,
                expected: rows,
                found: r,
            });
        };
        last_line = line;
        let found = row_text.chars().count();
        if found != cols {
            return Err(ScenarioError::RowWidth {
                line,
                expected: cols,
                found,
            });
        }
        for (c, ch) in row_text.chars().enumerate() {
            let here = Coord::new(r, c);
            let cell = match ch {
                '.' => Cell::Free,
                '#' => Cell::Obstacle,
                'S' | 'T' => {
                    let slot = if ch == 'S' { &mut start } else { &mut target };
                    if let Some((_, first)) = *slot {
                        return Err(ScenarioError::DuplicateMarker {
                            line,
                            marker: ch,
                            first,
                        });
                    }
                    *slot = Some((here, line));
                    Cell::Free
                }
                other => return Err(ScenarioError::BadCell { line, ch: other }),
            };
            cells.push(cell);
        }
    }
    let start = start.ok_or(ScenarioError::MissingMarker {
        line: last_line,
        marker: 'S',
    })?;
    let target = target.ok_or(ScenarioError::MissingMarker {
        line: last_line,
        marker: 'T',
    })?;

    let map = GridMap::new(rows, cols, cells, start.0, target.0).map_err(|e| ScenarioError::Invalid {
        line: header_line,
        message: e.to_string(),
    })?;
    let mut scenario = ScenarioConfig::new(map);

    for (line, l) in lines {
        let trimmed = l.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix("track:") {
            scenario.track = Some(parse_track(rest, line)?);
        } else if let Some(rest) = trimmed.strip_prefix("neighborhood:") {
            scenario.neighborhood = rest.parse().map_err(|message| ScenarioError::Invalid { line, message })?;
        } else {
            return Err(ScenarioError::Trailing {
                line,
                text: trimmed.to_string(),
            });
        }
    }
    Ok(scenario)
}

fn parse_track<T: Scalar>(text: &str, line: usize) -> Result<Vec<TrackSample<T>>, ScenarioError> {
    let bad = || ScenarioError::BadTrack {
        line,
        text: text.trim().to_string(),
    };
    let mut samples: Vec<TrackSample<T>> = Vec::new();
    for chunk in text.split(';').map(str::trim).filter(|c| !c.is_empty()) {
        let parts: Vec<f64> = chunk
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| bad())?;
        let [x, y, t] = parts[..] else {
            return Err(bad());
        };
        if !(x.is_finite() && y.is_finite() && t.is_finite()) {
            return Err(bad());
        }
        let sample = TrackSample {
            x: T::lit(x),
            y: T::lit(y),
            t: T::lit(t),
        };
        if samples.last().is_some_and(|prev| prev.t >= sample.t) {
            return Err(ScenarioError::TrackOrder { line });
        }
        samples.push(sample);
    }
    if samples.is_empty() {
        return Err(bad());
    }
    Ok(samples)
}

/// Inverse of [`load_scenario`].
pub fn serialize_scenario<T: Scalar>(scenario: &ScenarioConfig<T>) -> String {
    let map = &scenario.map;
    let mut out = format!("{} {}\n", map.rows(), map.cols());
    for r in 0..map.rows() {
        for c in 0..map.cols() {
            let here = Coord::new(r, c);
            out.push(if here == map.start() {
                'S'
            } else if here == map.target() {
                'T'
            } else if map.is_obstacle(here) {
                '#'
            } else {
                '.'
            });
        }
        out.push('\n');
    }
    if scenario.neighborhood != Neighborhood::Four {
        let _ = writeln!(out, "neighborhood: {}", scenario.neighborhood);
    }
    if let Some(track) = &scenario.track {
        let parts: Vec<String> = track
            .iter()
            .map(|s| format!("{},{},{}", s.x, s.y, s.t))
            .collect();
        let _ = writeln!(out, "track: {}", parts.join("; "));
    }
    out
}
