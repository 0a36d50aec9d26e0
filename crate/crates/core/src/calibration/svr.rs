//! Epsilon-insensitive support vector regression with an RBF kernel.
//!
//! The dual problem is solved by sequential minimal optimization over the
//! paired variables (alpha+, alpha-), selecting the maximal violating pair
//! with a second-order gain criterion: the first index maximizes the KKT
//! violation, the second maximizes the guaranteed objective decrease along
//! the feasible two-variable direction. Optimality is declared when the
//! violation gap falls below `tol`.
//!
//! The bias comes from averaging the gradient over free variables, falling
//! back to the midpoint of the KKT interval when every variable sits at a
//! bound — so a constant-target fit reproduces that constant exactly with an
//! empty support set.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Curvature floor for degenerate pair directions.
const TAU: f64 = 1e-12;

/// Hyperparameters of the solver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SvrParams {
    /// Box constraint on each dual variable.
    pub c: f64,
    /// RBF width: `k(x, z) = exp(-gamma * |x - z|^2)`.
    pub gamma: f64,
    /// Half-width of the insensitive tube.
    pub epsilon: f64,
    /// KKT violation gap at which the solver stops.
    pub tol: f64,
    /// Hard cap on pair updates.
    pub max_iter: usize,
}

impl Default for SvrParams {
    fn default() -> Self {
        SvrParams {
            c: 1.0,
            gamma: 0.1,
            epsilon: 0.01,
            tol: 1e-3,
            max_iter: 100_000,
        }
    }
}

impl SvrParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.c.is_finite() && self.c > 0.0) {
            return Err(Error::argument("c must be finite and positive"));
        }
        if !(self.gamma.is_finite() && self.gamma > 0.0) {
            return Err(Error::argument("gamma must be finite and positive"));
        }
        if !(self.epsilon.is_finite() && self.epsilon >= 0.0) {
            return Err(Error::argument("epsilon must be finite and non-negative"));
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(Error::argument("tol must be finite and positive"));
        }
        if self.max_iter == 0 {
            return Err(Error::argument("max_iter must be at least 1"));
        }
        Ok(())
    }
}

/// A fitted regressor: `f(x) = b + sum_i w_i k(sv_i, x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvrModel {
    /// Training rows with non-zero dual coefficient.
    pub support_vectors: Vec<Vec<f64>>,
    /// Dual coefficients `alpha+ - alpha-` of the support vectors.
    pub coefficients: Vec<f64>,
    pub intercept: f64,
    /// Width of the training rows; kept explicitly because a bias-only fit
    /// retains no support vectors to infer it from.
    pub n_features: usize,
    pub params: SvrParams,
    /// Pair updates spent by the solver.
    pub iterations: usize,
    /// Whether the violation gap closed before the iteration cap.
    pub converged: bool,
}

fn rbf(a: &[f64], b: &[f64], gamma: f64) -> f64 {
    let sq: f64 = a.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum();
    (-gamma * sq).exp()
}

/// Dense symmetric kernel matrix, row-major.
struct KernelMatrix {
    k: Vec<f64>,
    n: usize,
}

impl KernelMatrix {
    fn new(x: &[Vec<f64>], gamma: f64) -> KernelMatrix {
        let n = x.len();
        let mut k = vec![0.0; n * n];
        for i in 0..n {
            k[i * n + i] = 1.0;
            for j in i + 1..n {
                let v = rbf(&x[i], &x[j], gamma);
                k[i * n + j] = v;
                k[j * n + i] = v;
            }
        }
        KernelMatrix { k, n }
    }

    #[inline]
    fn row(&self, i: usize) -> &[f64] {
        &self.k[i * self.n..(i + 1) * self.n]
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.k[i * self.n + j]
    }
}

/// Which half of the paired dual a working-set index lives in.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Side {
    Plus,
    Minus,
}

impl Side {
    /// Sign this side contributes to the equality constraint and kernel
    /// expansion.
    fn sign(self) -> f64 {
        match self {
            Side::Plus => 1.0,
            Side::Minus => -1.0,
        }
    }
}

struct Solver {
    kernel: KernelMatrix,
    c: f64,
    /// Dual variables for the positive / negative tube violations.
    alpha_p: Vec<f64>,
    alpha_m: Vec<f64>,
    /// Objective gradients for the two variable blocks.
    grad_p: Vec<f64>,
    grad_m: Vec<f64>,
}

impl Solver {
    fn new(x: &[Vec<f64>], y: &[f64], params: &SvrParams) -> Solver {
        let n = x.len();
        Solver {
            kernel: KernelMatrix::new(x, params.gamma),
            c: params.c,
            alpha_p: vec![0.0; n],
            alpha_m: vec![0.0; n],
            grad_p: y.iter().map(|&t| params.epsilon - t).collect(),
            grad_m: y.iter().map(|&t| params.epsilon + t).collect(),
        }
    }

    fn alpha(&self, side: Side, i: usize) -> f64 {
        match side {
            Side::Plus => self.alpha_p[i],
            Side::Minus => self.alpha_m[i],
        }
    }

    fn grad(&self, side: Side, i: usize) -> f64 {
        match side {
            Side::Plus => self.grad_p[i],
            Side::Minus => self.grad_m[i],
        }
    }

    /// Pick the maximal violating pair. Returns `None` when the gap is
    /// within `tol`, i.e. the current point satisfies the KKT conditions.
    fn select_pair(&self, tol: f64) -> Option<((Side, usize), (Side, usize))> {
        let n = self.kernel.n;

        // First index: the steepest feasible ascent direction among
        // variables that can still increase.
        let mut g_max = f64::NEG_INFINITY;
        let mut first: Option<(Side, usize)> = None;
        for t in 0..n {
            if self.alpha_p[t] < self.c && -self.grad_p[t] > g_max {
                g_max = -self.grad_p[t];
                first = Some((Side::Plus, t));
            }
            if self.alpha_m[t] > 0.0 && self.grad_m[t] > g_max {
                g_max = self.grad_m[t];
                first = Some((Side::Minus, t));
            }
        }
        let (side_i, i) = first?;
        let k_ii = self.kernel.at(i, i);

        // Second index: among variables that can decrease, maximize the
        // second-order objective gain against the first pick.
        let mut g_max2 = f64::NEG_INFINITY;
        let mut best_gain = f64::NEG_INFINITY;
        let mut second: Option<(Side, usize)> = None;
        let mut consider = |side_j: Side, j: usize, grad_j: f64, this: &Solver| {
            // `grad_j` enters as y_j * G_j of the classification-style form.
            if grad_j > g_max2 {
                g_max2 = grad_j;
            }
            let violation = g_max + grad_j;
            if violation <= 0.0 {
                return;
            }
            let mut quad = k_ii + this.kernel.at(j, j) - 2.0 * this.kernel.at(i, j);
            if quad <= 0.0 {
                quad = TAU;
            }
            let gain = violation * violation / quad;
            if gain > best_gain {
                best_gain = gain;
                second = Some((side_j, j));
            }
        };
        for t in 0..n {
            if self.alpha_p[t] > 0.0 {
                consider(Side::Plus, t, self.grad_p[t], self);
            }
            if self.alpha_m[t] < self.c {
                consider(Side::Minus, t, -self.grad_m[t], self);
            }
        }

        if g_max + g_max2 < tol {
            return None;
        }
        second.map(|s| ((side_i, i), s))
    }

    /// Jointly optimize the selected pair, clip to the box, and update both
    /// gradient blocks.
    fn update_pair(&mut self, (side_i, i): (Side, usize), (side_j, j): (Side, usize)) {
        let quad = {
            let q = self.kernel.at(i, i) + self.kernel.at(j, j) - 2.0 * self.kernel.at(i, j);
            if q <= 0.0 {
                TAU
            } else {
                q
            }
        };
        let old_i = self.alpha(side_i, i);
        let old_j = self.alpha(side_j, j);
        let g_i = self.grad(side_i, i);
        let g_j = self.grad(side_j, j);

        let (mut a_i, mut a_j) = (old_i, old_j);
        if side_i == side_j {
            // Same block: the equality constraint moves them oppositely.
            let delta = (g_i - g_j) / quad;
            let sum = a_i + a_j;
            a_i -= delta;
            a_j += delta;
            if sum > self.c {
                if a_i > self.c {
                    a_i = self.c;
                    a_j = sum - self.c;
                }
            } else if a_j < 0.0 {
                a_j = 0.0;
                a_i = sum;
            }
            if sum > self.c {
                if a_j > self.c {
                    a_j = self.c;
                    a_i = sum - self.c;
                }
            } else if a_i < 0.0 {
                a_i = 0.0;
                a_j = sum;
            }
        } else {
            // Opposite blocks: both move together.
            let delta = (-g_i - g_j) / quad;
            let diff = a_i - a_j;
            a_i += delta;
            a_j += delta;
            if diff > 0.0 {
                if a_j < 0.0 {
                    a_j = 0.0;
                    a_i = diff;
                }
            } else if a_i < 0.0 {
                a_i = 0.0;
                a_j = -diff;
            }
            if diff > 0.0 {
                if a_i > self.c {
                    a_i = self.c;
                    a_j = self.c - diff;
                }
            } else if a_j > self.c {
                a_j = self.c;
                a_i = self.c + diff;
            }
        }

        let delta_i = a_i - old_i;
        let delta_j = a_j - old_j;
        match side_i {
            Side::Plus => self.alpha_p[i] = a_i,
            Side::Minus => self.alpha_m[i] = a_i,
        }
        match side_j {
            Side::Plus => self.alpha_p[j] = a_j,
            Side::Minus => self.alpha_m[j] = a_j,
        }

        // Both gradient blocks shift by the change in the kernel expansion.
        let row_i = self.kernel.row(i);
        let row_j = self.kernel.row(j);
        let si = side_i.sign() * delta_i;
        let sj = side_j.sign() * delta_j;
        for t in 0..self.kernel.n {
            let shift = si * row_i[t] + sj * row_j[t];
            self.grad_p[t] += shift;
            self.grad_m[t] -= shift;
        }
    }

    /// Bias from the KKT conditions at the final point.
    fn intercept(&self) -> f64 {
        let mut upper = f64::INFINITY;
        let mut lower = f64::NEG_INFINITY;
        let mut free_sum = 0.0;
        let mut free_count = 0usize;
        let mut visit = |alpha: f64, y_sign: f64, y_grad: f64| {
            if alpha >= self.c {
                if y_sign < 0.0 {
                    upper = upper.min(y_grad);
                } else {
                    lower = lower.max(y_grad);
                }
            } else if alpha <= 0.0 {
                if y_sign > 0.0 {
                    upper = upper.min(y_grad);
                } else {
                    lower = lower.max(y_grad);
                }
            } else {
                free_count += 1;
                free_sum += y_grad;
            }
        };
        for t in 0..self.kernel.n {
            visit(self.alpha_p[t], 1.0, self.grad_p[t]);
            visit(self.alpha_m[t], -1.0, -self.grad_m[t]);
        }
        let rho = if free_count > 0 {
            free_sum / free_count as f64
        } else {
            0.5 * (upper + lower)
        };
        -rho
    }
}

impl SvrModel {
    pub fn fit(x: &[Vec<f64>], y: &[f64], params: &SvrParams) -> Result<SvrModel> {
        params.validate()?;
        if x.is_empty() || x.len() != y.len() {
            return Err(Error::argument(
                "fit requires matching, non-empty features and targets",
            ));
        }
        let d = x[0].len();
        if d == 0 || x.iter().any(|row| row.len() != d) {
            return Err(Error::argument("feature rows must share a non-zero width"));
        }
        if y.iter().any(|v| !v.is_finite()) || x.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::argument("fit requires finite features and targets"));
        }

        let mut solver = Solver::new(x, y, params);
        let mut iterations = 0usize;
        let mut converged = false;
        while iterations < params.max_iter {
            match solver.select_pair(params.tol) {
                Some((first, second)) => {
                    solver.update_pair(first, second);
                    iterations += 1;
                }
                None => {
                    converged = true;
                    break;
                }
            }
        }
        // The cap can land exactly on the optimum; give the gap check the
        // final word.
        if !converged && solver.select_pair(params.tol).is_none() {
            converged = true;
        }

        let intercept = solver.intercept();
        let mut support_vectors = Vec::new();
        let mut coefficients = Vec::new();
        for (t, row) in x.iter().enumerate() {
            let w = solver.alpha_p[t] - solver.alpha_m[t];
            if w != 0.0 {
                support_vectors.push(row.clone());
                coefficients.push(w);
            }
        }
        Ok(SvrModel {
            support_vectors,
            coefficients,
            intercept,
            n_features: d,
            params: *params,
            iterations,
            converged,
        })
    }

    pub fn predict_one(&self, x: &[f64]) -> f64 {
        let mut acc = self.intercept;
        for (sv, w) in self.support_vectors.iter().zip(&self.coefficients) {
            acc += w * rbf(sv, x, self.params.gamma);
        }
        acc
    }

    pub fn predict(&self, x: &[Vec<f64>]) -> Vec<f64> {
        x.iter().map(|row| self.predict_one(row)).collect()
    }

    pub fn support_count(&self) -> usize {
        self.support_vectors.len()
    }
}
