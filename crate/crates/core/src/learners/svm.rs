//! Kernel SVM trained by sequential minimal optimisation with second-order
//! working-set selection. The sigmoid kernel is not positive semi-definite,
//! so non-positive curvature along a pair is replaced by a small constant.
//!
//! Probabilities are the logistic function of the decision value. They are
//! monotone in the margin but not calibrated.

use serde::{Deserialize, Serialize};

use super::spec::{LearnerSpec, ParamReader};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::num::{self, sigmoid, Float};

const TAU: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gamma {
    /// `1 / (n_features * var(X))`, variance over every entry of X.
    Scale,
    Value(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kernel {
    Sigmoid,
    Rbf,
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvmParams {
    pub c: f64,
    pub kernel: Kernel,
    pub gamma: Gamma,
    pub coef0: f64,
    pub tol: f64,
    /// Iteration cap is `max_passes * n`.
    pub max_passes: usize,
}

impl Default for SvmParams {
    fn default() -> Self {
        Self { c: 1.0, kernel: Kernel::Sigmoid, gamma: Gamma::Scale, coef0: 0.0, tol: 1e-3, max_passes: 10 }
    }
}

impl SvmParams {
    pub fn from_spec(spec: &LearnerSpec) -> Result<Self> {
        let d = Self::default();
        let mut r = ParamReader::new(spec);
        let c = r.positive_float("c", d.c)?;
        let kernel = match r.choice("kernel", "sigmoid", &["sigmoid", "rbf", "linear"])? {
            "rbf" => Kernel::Rbf,
            "linear" => Kernel::Linear,
            _ => Kernel::Sigmoid,
        };
        let gamma = match r.float_or_choice("gamma", "scale", &["scale"])? {
            Ok(v) => Gamma::Value(v),
            Err(_) => Gamma::Scale,
        };
        let coef0 = r.float("coef0", d.coef0)?;
        let tol = r.positive_float("tol", d.tol)?;
        let max_passes = r.count("max_passes", d.max_passes)?;
        // Accepted for compatibility; only the polynomial kernel would use it.
        r.count("degree", 3)?;
        r.finish()?;
        Ok(Self { c, kernel, gamma, coef0, tol, max_passes })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct KernelFn<F: Float> {
    pub kind: Kernel,
    pub gamma: F,
    pub coef0: F,
}

impl<F: Float> KernelFn<F> {
    pub fn eval(&self, a: &[F], b: &[F]) -> F {
        match self.kind {
            Kernel::Sigmoid => {
                let dot: F = a.iter().zip(b).map(|(&u, &v)| u * v).sum();
                (self.gamma * dot + self.coef0).tanh()
            }
            Kernel::Linear => a.iter().zip(b).map(|(&u, &v)| u * v).sum(),
            Kernel::Rbf => {
                let d2: F = a.iter().zip(b).map(|(&u, &v)| (u - v) * (u - v)).sum();
                (-self.gamma * d2).exp()
            }
        }
    }
}

/// Dual solution of the C-SVC problem.
#[derive(Debug, Clone)]
pub struct SmoSolution<F> {
    pub alpha: Vec<F>,
    /// Gradient of the dual objective, `Q alpha - 1`.
    pub grad: Vec<F>,
    pub rho: F,
    pub iterations: usize,
    /// `max_{I_up} -y G - min_{I_low} -y G`; zero at an exact KKT point.
    pub kkt_gap: F,
}

fn in_up<F: Float>(y: i8, a: F, c: F) -> bool {
    (y == 1 && a < c) || (y == -1 && a > F::zero())
}

fn in_low<F: Float>(y: i8, a: F, c: F) -> bool {
    (y == 1 && a > F::zero()) || (y == -1 && a < c)
}

/// KKT gap of an arbitrary dual point.
pub fn kkt_gap<F: Float>(y: &[i8], alpha: &[F], grad: &[F], c: F) -> F {
    let mut up = F::neg_infinity();
    let mut low = F::infinity();
    for t in 0..y.len() {
        let v = -F::of(f64::from(y[t])) * grad[t];
        if in_up(y[t], alpha[t], c) {
            up = up.max(v);
        }
        if in_low(y[t], alpha[t], c) {
            low = low.min(v);
        }
    }
    if up == F::neg_infinity() || low == F::infinity() {
        F::zero()
    } else {
        up - low
    }
}

/// Solves the dual for a precomputed row-major kernel matrix and ±1 labels.
pub fn smo_solve<F: Float>(k: &[F], y: &[i8], c: F, tol: F, max_iter: usize) -> SmoSolution<F> {
    let n = y.len();
    let kk = |i: usize, j: usize| k[i * n + j];
    let yf: Vec<F> = y.iter().map(|&v| F::of(f64::from(v))).collect();
    let tau = F::of(TAU);
    let mut alpha = vec![F::zero(); n];
    let mut g = vec![-F::one(); n];
    let mut iterations = 0;
    while iterations < max_iter {
        let mut gmax = F::neg_infinity();
        let mut i_sel = None;
        for t in 0..n {
            if in_up(y[t], alpha[t], c) {
                let v = -yf[t] * g[t];
                if v >= gmax {
                    gmax = v;
                    i_sel = Some(t);
                }
            }
        }
        let Some(i) = i_sel else { break };
        let mut gmax2 = F::neg_infinity();
        let mut obj_min = F::infinity();
        let mut j_sel = None;
        for t in 0..n {
            if !in_low(y[t], alpha[t], c) {
                continue;
            }
            let v = yf[t] * g[t];
            if v >= gmax2 {
                gmax2 = v;
            }
            let b = gmax + v;
            if b > F::zero() {
                let mut quad = kk(i, i) + kk(t, t) - F::of(2.0) * kk(i, t);
                if quad <= F::zero() {
                    quad = tau;
                }
                let obj = -(b * b) / quad;
                if obj <= obj_min {
                    obj_min = obj;
                    j_sel = Some(t);
                }
            }
        }
        let Some(j) = j_sel else { break };
        if gmax + gmax2 < tol {
            break;
        }
        iterations += 1;

        let (ai, aj) = (alpha[i], alpha[j]);
        let q_ij = yf[i] * yf[j] * kk(i, j);
        if y[i] != y[j] {
            let mut quad = kk(i, i) + kk(j, j) + F::of(2.0) * q_ij;
            if quad <= F::zero() {
                quad = tau;
            }
            let delta = (-g[i] - g[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] = alpha[i] + delta;
            alpha[j] = alpha[j] + delta;
            if diff > F::zero() {
                if alpha[j] < F::zero() {
                    alpha[j] = F::zero();
                    alpha[i] = diff;
                }
            } else if alpha[i] < F::zero() {
                alpha[i] = F::zero();
                alpha[j] = -diff;
            }
            if diff > F::zero() {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let mut quad = kk(i, i) + kk(j, j) - F::of(2.0) * q_ij;
            if quad <= F::zero() {
                quad = tau;
            }
            let delta = (g[i] - g[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] = alpha[i] - delta;
            alpha[j] = alpha[j] + delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if alpha[j] < F::zero() {
                alpha[j] = F::zero();
                alpha[i] = sum;
            }
            if sum > c {
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if alpha[i] < F::zero() {
                alpha[i] = F::zero();
                alpha[j] = sum;
            }
        }
        let (di, dj) = (alpha[i] - ai, alpha[j] - aj);
        for t in 0..n {
            g[t] = g[t] + yf[t] * (yf[i] * kk(i, t) * di + yf[j] * kk(j, t) * dj);
        }
    }

    let (mut ub, mut lb) = (F::infinity(), F::neg_infinity());
    let (mut n_free, mut sum_free) = (0usize, F::zero());
    for t in 0..n {
        let yg = yf[t] * g[t];
        let at_upper = alpha[t] >= c;
        let at_lower = alpha[t] <= F::zero();
        if at_upper {
            if y[t] == -1 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if at_lower {
            if y[t] == 1 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            n_free += 1;
            sum_free = sum_free + yg;
        }
    }
    let rho = if n_free > 0 { sum_free / F::of_usize(n_free) } else { (ub + lb) / F::of(2.0) };
    let kkt_gap = kkt_gap(y, &alpha, &g, c);
    SmoSolution { alpha, grad: g, rho, iterations, kkt_gap }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct SvmModel<F: Float> {
    pub kernel: KernelFn<F>,
    pub support: Matrix<F>,
    /// `alpha_i * y_i` for each support vector.
    pub coef: Vec<F>,
    pub rho: F,
}

pub(crate) fn resolve_gamma<F: Float>(gamma: Gamma, x: &Matrix<F>) -> F {
    match gamma {
        Gamma::Value(v) => F::of(v),
        Gamma::Scale => {
            let var = num::variance(x.as_slice());
            if var > F::zero() {
                F::one() / (F::of_usize(x.ncols()) * var)
            } else {
                F::one()
            }
        }
    }
}

impl<F: Float> SvmModel<F> {
    pub fn fit(params: &SvmParams, x: &Matrix<F>, labels: &[u8]) -> Result<(Self, SmoSolution<F>)> {
        if labels.iter().all(|&l| l == labels[0]) {
            return Err(Error::SingleClass("svm".into()));
        }
        let kernel =
            KernelFn { kind: params.kernel, gamma: resolve_gamma(params.gamma, x), coef0: F::of(params.coef0) };
        let n = labels.len();
        let mut k = vec![F::zero(); n * n];
        for i in 0..n {
            for j in i..n {
                let v = kernel.eval(x.row(i), x.row(j));
                k[i * n + j] = v;
                k[j * n + i] = v;
            }
        }
        let y: Vec<i8> = labels.iter().map(|&l| if l == 1 { 1 } else { -1 }).collect();
        let sol = smo_solve(&k, &y, F::of(params.c), F::of(params.tol), params.max_passes.saturating_mul(n));
        let sv: Vec<usize> = (0..n).filter(|&i| sol.alpha[i] > F::zero()).collect();
        let coef = sv.iter().map(|&i| sol.alpha[i] * F::of(f64::from(y[i]))).collect();
        let model = Self { kernel, support: x.select_rows(&sv), coef, rho: sol.rho };
        Ok((model, sol))
    }

    pub fn decision_function(&self, row: &[F]) -> F {
        self.support.rows_iter().zip(&self.coef).map(|(s, &c)| c * self.kernel.eval(s, row)).sum::<F>() - self.rho
    }

    pub fn positive_proba(&self, x: &Matrix<F>) -> Vec<F> {
        x.rows_iter().map(|r| sigmoid(self.decision_function(r))).collect()
    }
}
