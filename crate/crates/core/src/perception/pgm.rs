//! Plain (ASCII, `P2`) portable graymap I/O.

use thiserror::Error;

use super::{FrameError, ImageFrame, WHITE};
use crate::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PgmError {
    #[error("not a plain PGM file (magic `{0}`, expected `P2`)")]
    Magic(String),
    #[error("truncated PGM: missing {0}")]
    Truncated(&'static str),
    #[error("bad PGM token `{0}`")]
    Token(String),
    #[error("maxval {0} must be in 1..=65535")]
    MaxVal(u32),
    #[error("sample {value} exceeds maxval {max}")]
    Sample { value: u32, max: u32 },
    #[error(transparent)]
    Frame(#[from] FrameError),
}

/// Reads a `P2` image, rescaling samples to `[0, 255]`.
pub fn read_pgm<T: Scalar>(text: &str) -> Result<ImageFrame<T>, PgmError> {
    let mut tokens = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .flat_map(str::split_whitespace);
    let magic = tokens.next().ok_or(PgmError::Truncated("magic"))?;
    if magic != "P2" {
        return Err(PgmError::Magic(magic.to_string()));
    }
    let mut number = |what: &'static str| -> Result<u32, PgmError> {
        let tok = tokens.next().ok_or(PgmError::Truncated(what))?;
        tok.parse().map_err(|_| PgmError::Token(tok.to_string()))
    };
    let cols = number("width")? as usize;
    let rows = number("height")? as usize;
    let max = number("maxval")?;
    if max == 0 || max > 65535 {
        return Err(PgmError::MaxVal(max));
    }
    let scale = T::lit(WHITE) / T::lit(f64::from(max));
    let mut pixels = Vec::with_capacity(rows * cols);
    for _ in 0..rows * cols {
        let v = number("pixel data")?;
        if v > max {
            return Err(PgmError::Sample { value: v, max });
        }
        pixels.push(if max == 255 {
            T::lit(f64::from(v))
        } else {
            (T::lit(f64::from(v)) * scale).min(T::lit(WHITE))
        });
    }
    Ok(ImageFrame::new(rows, cols, pixels)?)
}

/// Writes a `P2` image with maxval 255, samples rounded to the nearest integer.
pub fn write_pgm<T: Scalar>(frame: &ImageFrame<T>) -> String {
    let mut out = format!("P2\n{} {}\n255\n", frame.cols(), frame.rows());
    for row in frame.pixels().chunks(frame.cols()) {
        // Keep lines under 70 characters.
        for chunk in row.chunks(16) {
            let line: Vec<String> = chunk
                .iter()
                .map(|v| format!("{}", v.round().to_f64_lossy() as u32))
                .collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
    }
    out
}
