//! Ordinary least-squares regression via the normal equations.
//!
//! Features and target are centered before solving, which keeps the Gram
//! matrix well conditioned for the dB-scale inputs this crate works with and
//! gives the intercept in closed form.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A fitted linear model: `y = w . x + b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub weights: Vec<f64>,
    pub intercept: f64,
}

impl LinearModel {
    /// Fit by least squares. Requires at least one sample and consistent row
    /// widths; a rank-deficient Gram matrix is reported as a singular-system
    /// error rather than silently regularized.
    pub fn fit(x: &[Vec<f64>], y: &[f64]) -> Result<LinearModel> {
        if x.is_empty() || x.len() != y.len() {
            return Err(Error::argument(
                "fit requires matching, non-empty features and targets",
            ));
        }
        let d = x[0].len();
        if d == 0 || x.iter().any(|row| row.len() != d) {
            return Err(Error::argument("feature rows must share a non-zero width"));
        }
        let n = x.len() as f64;

        let mut x_mean = vec![0.0; d];
        for row in x {
            for (m, v) in x_mean.iter_mut().zip(row) {
                *m += v;
            }
        }
        for m in &mut x_mean {
            *m /= n;
        }
        let y_mean = y.iter().sum::<f64>() / n;

        // Gram matrix and moment vector of the centered data.
        let mut gram = vec![vec![0.0; d]; d];
        let mut moment = vec![0.0; d];
        for (row, &target) in x.iter().zip(y) {
            let centered: Vec<f64> = row.iter().zip(&x_mean).map(|(v, m)| v - m).collect();
            let ty = target - y_mean;
            for i in 0..d {
                moment[i] += centered[i] * ty;
                for j in i..d {
                    gram[i][j] += centered[i] * centered[j];
                }
            }
        }
        for i in 0..d {
            for j in 0..i {
                gram[i][j] = gram[j][i];
            }
        }

        let weights = solve_symmetric(gram, moment)?;
        let intercept = y_mean
            - weights
                .iter()
                .zip(&x_mean)
                .map(|(w, m)| w * m)
                .sum::<f64>();
        Ok(LinearModel { weights, intercept })
    }

    pub fn predict_one(&self, x: &[f64]) -> f64 {
        self.intercept
            + self
                .weights
                .iter()
                .zip(x)
                .map(|(w, v)| w * v)
                .sum::<f64>()
    }

    pub fn predict(&self, x: &[Vec<f64>]) -> Vec<f64> {
        x.iter().map(|row| self.predict_one(row)).collect()
    }
}

/// Gaussian elimination with partial pivoting on a dense square system.
fn solve_symmetric(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Result<Vec<f64>> {
    let n = b.len();
    // Degeneracy threshold relative to the largest diagonal entry.
    let scale = a
        .iter()
        .enumerate()
        .map(|(i, row)| row[i].abs())
        .fold(0.0f64, f64::max)
        .max(1.0);
    let tol = scale * 1e-12;

    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&r1, &r2| a[r1][col].abs().total_cmp(&a[r2][col].abs()))
            .expect("non-empty pivot range");
        if a[pivot_row][col].abs() <= tol {
            return Err(Error::Singular(
                "normal equations are rank-deficient (constant or collinear features)".into(),
            ));
        }
        a.swap(col, pivot_row);
        b.swap(col, pivot_row);
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            if factor == 0.0 {
                continue;
            }
            for k in col..n {
                a[row][k] -= factor * a[col][k];
            }
            b[row] -= factor * b[col];
        }
    }

    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for col in row + 1..n {
            acc -= a[row][col] * x[col];
        }
        x[row] = acc / a[row][row];
    }
    Ok(x)
}
