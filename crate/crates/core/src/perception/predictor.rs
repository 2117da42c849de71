//! Linear prediction of a sequence from its own past:
//!
//! ```text
//! ŷ(n) = -Σ_{i=1..k} a_i y(n-i)
//! ```
//!
//! Coefficients minimise the mean squared one-step error `E[e²(n)]`, with
//! `e(n) = y(n) - ŷ(n)`. Note the sign: `a_i` is the negated autoregressive
//! coefficient.

use thiserror::Error;

use crate::Scalar;

/// Ridge added to the normal equations when they are singular.
pub const RIDGE: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PredictorError {
    #[error("predictor order must be at least 1")]
    ZeroOrder,
    #[error("signal of length {len} is too short for order {order} (need more than {need})")]
    TooShort { len: usize, order: usize, need: usize },
    #[error("signal contains non-finite samples")]
    NonFinite,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PredictorModel<T> {
    coefficients: Vec<T>,
    regularized: bool,
}

impl<T: Scalar> PredictorModel<T> {
    /// Builds a model from `a_1..a_k`.
    pub fn new(coefficients: Vec<T>) -> Self {
        assert!(!coefficients.is_empty(), "order must be at least 1");
        Self {
            coefficients,
            regularized: false,
        }
    }

    pub fn order(&self) -> usize {
        self.coefficients.len()
    }

    pub fn coefficients(&self) -> &[T] {
        &self.coefficients
    }

    /// True when the fit fell back to the ridge solve.
    pub fn regularized(&self) -> bool {
        self.regularized
    }

    /// Prediction of `signal[n]` from `signal[n-k..n]`.
    pub fn predict(&self, signal: &[T], n: usize) -> T {
        -self
            .coefficients
            .iter()
            .enumerate()
            .fold(T::zero(), |acc, (i, &a)| acc + a * signal[n - 1 - i])
    }
}

/// Least-squares fit of an order-`k` predictor over `n = k..len`.
pub fn fit_predictor<T: Scalar>(signal: &[T], k: usize) -> Result<PredictorModel<T>, PredictorError> {
    if k == 0 {
        return Err(PredictorError::ZeroOrder);
    }
    if signal.len() <= 2 * k {
        return Err(PredictorError::TooShort {
            len: signal.len(),
            order: k,
            need: 2 * k,
        });
    }
    if signal.iter().any(|v| !v.is_finite()) {
        return Err(PredictorError::NonFinite);
    }

    // Normal equations for c = -a: R c = r with
    // R[i][j] = Σ y(n-1-i) y(n-1-j), r[i] = Σ y(n) y(n-1-i).
    let mut gram = vec![vec![T::zero(); k]; k];
    let mut rhs = vec![T::zero(); k];
    for n in k..signal.len() {
        for i in 0..k {
            let yi = signal[n - 1 - i];
            rhs[i] += signal[n] * yi;
            for j in 0..k {
                gram[i][j] += yi * signal[n - 1 - j];
            }
        }
    }

    let (c, regularized) = match solve(gram.clone(), rhs.clone()) {
        Some(c) => (c, false),
        None => {
            for (i, row) in gram.iter_mut().enumerate() {
                row[i] += T::lit(RIDGE);
            }
            let c = solve(gram, rhs).unwrap_or_else(|| vec![T::zero(); k]);
            (c, true)
        }
    };
    Ok(PredictorModel {
        coefficients: c.into_iter().map(|v| -v).collect(),
        regularized,
    })
}

/// Gaussian elimination with partial pivoting; `None` if a pivot is
/// negligible against the matrix scale.
fn solve<T: Scalar>(mut a: Vec<Vec<T>>, mut b: Vec<T>) -> Option<Vec<T>> {
    let n = b.len();
    let scale = a
        .iter()
        .flat_map(|row| row.iter())
        .fold(T::zero(), |m, v| m.max(v.abs()));
    let eps = T::epsilon() * T::from_count(n.max(1)) * T::lit(16.0);
    if scale == T::zero() {
        return None;
    }
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| {
            a[i][col]
                .abs()
                .partial_cmp(&a[j][col].abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        if a[pivot][col].abs() <= eps * scale {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            if f == T::zero() {
                continue;
            }
            for j in col..n {
                let v = a[col][j];
                a[row][j] -= f * v;
            }
            let v = b[col];
            b[row] -= f * v;
        }
    }
    let mut x = vec![T::zero(); n];
    for i in (0..n).rev() {
        let mut acc = b[i];
        for j in i + 1..n {
            acc -= a[i][j] * x[j];
        }
        x[i] = acc / a[i][i];
    }
    Some(x)
}

/// Mean squared one-step prediction error over `n = k..len`.
pub fn residual_score<T: Scalar>(signal: &[T], model: &PredictorModel<T>) -> Result<T, PredictorError> {
    let k = model.order();
    if signal.len() <= k {
        return Err(PredictorError::TooShort {
            len: signal.len(),
            order: k,
            need: k,
        });
    }
    let mut acc = T::zero();
    for n in k..signal.len() {
        let e = signal[n] - model.predict(signal, n);
        acc += e * e;
    }
    Ok(acc / T::from_count(signal.len() - k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn all_zero_signal() {
        let m = fit_predictor(&[0.0f64; 16], 1).unwrap();
        assert_eq!(m.coefficients(), &[0.0]);
        assert!(m.regularized());
        assert_eq!(residual_score(&[0.0f64; 16], &m).unwrap(), 0.0);
    }

    #[test]
    fn ar1_recovery_uses_negated_sign() {
        // y(n) = -0.5 y(n-1), so ŷ(n) = -a_1 y(n-1) gives a_1 = 0.5.
        let mut y = vec![1.0f64];
        for _ in 1..64 {
            y.push(-0.5 * y.last().unwrap());
        }
        let m = fit_predictor(&y, 1).unwrap();
        assert!((m.coefficients()[0] - 0.5).abs() < 1e-9);
        assert!(!m.regularized());
        assert!(residual_score(&y, &m).unwrap() < 1e-20);
    }

    #[test]
    fn ar2_recovery() {
        // Undamped oscillator y(n) = 2cos(w) y(n-1) - y(n-2).
        let w = 0.3f64;
        let phi = [2.0 * w.cos(), -1.0];
        let mut y = vec![1.0, w.cos()];
        for n in 2..200 {
            y.push(phi[0] * y[n - 1] + phi[1] * y[n - 2]);
        }
        let m = fit_predictor(&y, 2).unwrap();
        assert!((m.coefficients()[0] + phi[0]).abs() < 1e-6);
        assert!((m.coefficients()[1] + phi[1]).abs() < 1e-6);
    }

    #[test]
    fn white_noise_residual_near_variance() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        // Box-Muller to keep the oracle independent of any distribution crate.
        let y: Vec<f64> = (0..10_000)
            .map(|_| {
                let (u1, u2): (f64, f64) = (rng.random::<f64>().max(1e-300), rng.random());
                (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
            })
            .collect();
        let zero = PredictorModel::new(vec![0.0]);
        let s = residual_score(&y, &zero).unwrap();
        assert!((s - 1.0).abs() < 0.1, "{s}");
        let flipped: Vec<f64> = y.iter().map(|v| -v).collect();
        assert_eq!(residual_score(&flipped, &zero).unwrap(), s);
    }

    #[test]
    fn length_and_order_checks() {
        assert_eq!(fit_predictor(&[1.0f64; 4], 0), Err(PredictorError::ZeroOrder));
        assert!(matches!(fit_predictor(&[1.0f64; 4], 2), Err(PredictorError::TooShort { .. })));
        assert!(fit_predictor(&[1.0f64, 2.0, f64::NAN, 4.0, 5.0], 1).is_err());
        assert!(residual_score(&[1.0f64], &PredictorModel::new(vec![0.0])).is_err());
    }
}
