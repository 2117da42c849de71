//! Frame pre-processing: threshold binarization, occupancy extraction,
//! spatial-frequency sharpness and linear-prediction noise scores.

mod pgm;
mod predictor;

pub use pgm::{read_pgm, write_pgm, PgmError};
pub use predictor::{fit_predictor, residual_score, PredictorError, PredictorModel, RIDGE};

use thiserror::Error;

use crate::grid::{Cell, Coord, GridError, GridMap};
use crate::numfmt::sig6;
use crate::Scalar;

pub const WHITE: f64 = 255.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FrameError {
    #[error("frame must be at least 1x1")]
    Empty,
    #[error("expected {expected} pixels, got {found}")]
    Size { expected: usize, found: usize },
    #[error("pixel {index} = {value} is outside [0, 255]")]
    Range { index: usize, value: f64 },
    #[error("threshold {0} must lie strictly between 0 and 255")]
    Threshold(f64),
    #[error("{rows}x{cols} frame is not divisible into {cell}x{cell} blocks")]
    NotDivisible { rows: usize, cols: usize, cell: usize },
}

/// Grayscale frame, row-major, intensities in `[0, 255]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageFrame<T> {
    rows: usize,
    cols: usize,
    pixels: Vec<T>,
}

impl<T: Scalar> ImageFrame<T> {
    pub fn new(rows: usize, cols: usize, pixels: Vec<T>) -> Result<Self, FrameError> {
        if rows == 0 || cols == 0 {
            return Err(FrameError::Empty);
        }
        if pixels.len() != rows * cols {
            return Err(FrameError::Size {
                expected: rows * cols,
                found: pixels.len(),
            });
        }
        let white = T::lit(WHITE);
        if let Some((index, &v)) = pixels
            .iter()
            .enumerate()
            .find(|(_, &v)| !(v >= T::zero() && v <= white))
        {
            return Err(FrameError::Range {
                index,
                value: v.to_f64_lossy(),
            });
        }
        Ok(Self { rows, cols, pixels })
    }

    pub fn filled(rows: usize, cols: usize, value: T) -> Result<Self, FrameError> {
        Self::new(rows, cols, vec![value; rows * cols])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn pixels(&self) -> &[T] {
        &self.pixels
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> T {
        self.pixels[row * self.cols + col]
    }

    pub fn transpose(&self) -> Self {
        let mut pixels = Vec::with_capacity(self.pixels.len());
        for c in 0..self.cols {
            for r in 0..self.rows {
                pixels.push(self.get(r, c));
            }
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            pixels,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinarizeParams<T> {
    threshold: T,
}

impl<T: Scalar> BinarizeParams<T> {
    pub fn new(threshold: T) -> Result<Self, FrameError> {
        if threshold > T::zero() && threshold < T::lit(WHITE) {
            Ok(Self { threshold })
        } else {
            Err(FrameError::Threshold(threshold.to_f64_lossy()))
        }
    }

    pub fn threshold(&self) -> T {
        self.threshold
    }
}

/// `255` where the pixel exceeds the threshold, `0` otherwise. A pixel equal
/// to the threshold maps to `0`.
pub fn binarize<T: Scalar>(frame: &ImageFrame<T>, p: &BinarizeParams<T>) -> ImageFrame<T> {
    let white = T::lit(WHITE);
    ImageFrame {
        rows: frame.rows,
        cols: frame.cols,
        pixels: frame
            .pixels
            .iter()
            .map(|&v| if v > p.threshold { white } else { T::zero() })
            .collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpatialFrequency<T> {
    pub fx: T,
    pub fy: T,
    pub sf: T,
}

/// Row and column frequency:
///
/// ```text
/// f_x = sqrt( 1/(MN) Σ_{i=1..M} Σ_{j=2..N} (I(i,j) - I(i,j-1))² )
/// f_y = sqrt( 1/(MN) Σ_{i=2..M} Σ_{j=1..N} (I(i,j) - I(i-1,j))² )
/// ```
///
/// and `sf = sqrt(f_x² + f_y²)`. A component with no difference pairs is 0.
pub fn spatial_frequency<T: Scalar>(frame: &ImageFrame<T>) -> SpatialFrequency<T> {
    let (m, n) = (frame.rows, frame.cols);
    let norm = T::from_count(m * n);
    let mut sx = T::zero();
    let mut sy = T::zero();
    for i in 0..m {
        for j in 0..n {
            let v = frame.get(i, j);
            if j > 0 {
                let d = v - frame.get(i, j - 1);
                sx += d * d;
            }
            if i > 0 {
                let d = v - frame.get(i - 1, j);
                sy += d * d;
            }
        }
    }
    let fx = (sx / norm).sqrt();
    let fy = (sy / norm).sqrt();
    SpatialFrequency {
        fx,
        fy,
        sf: (sx / norm + sy / norm).sqrt(),
    }
}

/// Which binarized value marks an occupied cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Polarity {
    #[default]
    WhiteIsObstacle,
    BlackIsObstacle,
}

/// Occupancy extracted from a frame, before start and target are chosen.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Occupancy {
    pub rows: usize,
    pub cols: usize,
    pub cells: Vec<Cell>,
}

impl Occupancy {
    pub fn obstacle_count(&self) -> usize {
        self.cells.iter().filter(|&&c| c == Cell::Obstacle).count()
    }

    pub fn into_map(self, start: Coord, target: Coord) -> Result<GridMap, GridError> {
        GridMap::new(self.rows, self.cols, self.cells, start, target)
    }
}

/// Binarizes, then marks each `cell x cell` block occupied when at least half
/// of its pixels carry the occupied value.
pub fn frame_to_grid<T: Scalar>(
    frame: &ImageFrame<T>,
    p: &BinarizeParams<T>,
    cell: usize,
    polarity: Polarity,
) -> Result<Occupancy, FrameError> {
    if cell == 0 || !frame.rows.is_multiple_of(cell) || !frame.cols.is_multiple_of(cell) {
        return Err(FrameError::NotDivisible {
            rows: frame.rows,
            cols: frame.cols,
            cell,
        });
    }
    let bin = binarize(frame, p);
    let occupied = match polarity {
        Polarity::WhiteIsObstacle => T::lit(WHITE),
        Polarity::BlackIsObstacle => T::zero(),
    };
    let (rows, cols) = (frame.rows / cell, frame.cols / cell);
    let mut cells = Vec::with_capacity(rows * cols);
    for br in 0..rows {
        for bc in 0..cols {
            let mut hits = 0;
            for r in br * cell..(br + 1) * cell {
                for c in bc * cell..(bc + 1) * cell {
                    if bin.get(r, c) == occupied {
                        hits += 1;
                    }
                }
            }
            cells.push(if 2 * hits >= cell * cell {
                Cell::Obstacle
            } else {
                Cell::Free
            });
        }
    }
    Ok(Occupancy { rows, cols, cells })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QualityReport<T> {
    pub fx: T,
    pub fy: T,
    pub sf: T,
    pub residual_mse: T,
}

impl<T: Scalar> QualityReport<T> {
    pub const CSV_HEADER: &'static str = "f_x,f_y,sf,residual_mse";

    pub fn to_csv_row(&self) -> String {
        [self.fx, self.fy, self.sf, self.residual_mse]
            .map(|v| sig6(v.to_f64_lossy()))
            .join(",")
    }
}

/// Spatial frequency of the frame plus the residual of an order-`order`
/// linear predictor fitted to its row-major pixel sequence.
pub fn assess<T: Scalar>(frame: &ImageFrame<T>, order: usize) -> Result<(QualityReport<T>, PredictorModel<T>), PredictorError> {
    let sf = spatial_frequency(frame);
    let model = fit_predictor(frame.pixels(), order)?;
    let residual_mse = residual_score(frame.pixels(), &model)?;
    Ok((
        QualityReport {
            fx: sf.fx,
            fy: sf.fy,
            sf: sf.sf,
            residual_mse,
        },
        model,
    ))
}
