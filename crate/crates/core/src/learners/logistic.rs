//! L2-regularised logistic regression fitted by damped Newton iterations.
//!
//! Objective: `0.5 * |w|^2 + C * sum_i logloss(y_i, w.x_i + b)`; the
//! intercept is not penalised.

use serde::{Deserialize, Serialize};

use super::linalg;
use super::spec::{LearnerSpec, ParamReader};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::num::{sigmoid, Float};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogisticParams {
    /// Inverse regularisation strength.
    pub c: f64,
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for LogisticParams {
    fn default() -> Self {
        Self { c: 1.0, max_iter: 1000, tol: 1e-6 }
    }
}

impl LogisticParams {
    pub fn from_spec(spec: &LearnerSpec) -> Result<Self> {
        let d = Self::default();
        let mut r = ParamReader::new(spec);
        let c = r.positive_float("c", d.c)?;
        let max_iter = r.count("max_iter", d.max_iter)?;
        let tol = r.positive_float("tol", d.tol)?;
        r.finish()?;
        Ok(Self { c, max_iter, tol })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct LogisticModel<F: Float> {
    pub weights: Vec<F>,
    pub intercept: F,
    pub n_iter: usize,
}

fn softplus<F: Float>(z: F) -> F {
    if z > F::zero() {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

impl<F: Float> LogisticModel<F> {
    pub fn from_parts(weights: Vec<F>, intercept: F) -> Self {
        Self { weights, intercept, n_iter: 0 }
    }

    fn margin(&self, row: &[F]) -> F {
        self.intercept + row.iter().zip(&self.weights).map(|(&a, &b)| a * b).sum::<F>()
    }

    fn objective(&self, x: &Matrix<F>, y: &[F], c: F) -> F {
        let reg = self.weights.iter().map(|&w| w * w).sum::<F>() * F::of(0.5);
        let loss = x.rows_iter().zip(y).map(|(r, &t)| softplus(self.margin(r)) - t * self.margin(r)).sum::<F>();
        reg + c * loss
    }

    pub fn fit(params: &LogisticParams, x: &Matrix<F>, labels: &[u8]) -> Result<Self> {
        if labels.iter().all(|&l| l == labels[0]) {
            return Err(Error::SingleClass("logistic_regression".into()));
        }
        let d = x.ncols();
        let m = d + 1;
        let c = F::of(params.c);
        let tol = F::of(params.tol);
        let y: Vec<F> = labels.iter().map(|&l| F::of_usize(l as usize)).collect();
        let mut model = Self::from_parts(vec![F::zero(); d], F::zero());
        let mut obj = model.objective(x, &y, c);
        for it in 0..params.max_iter {
            model.n_iter = it + 1;
            // Gradient and Hessian over (w_0..w_{d-1}, b).
            let mut g = vec![F::zero(); m];
            let mut h = vec![F::zero(); m * m];
            for (row, &t) in x.rows_iter().zip(&y) {
                let p = sigmoid(model.margin(row));
                let r = c * (p - t);
                let s = c * p * (F::one() - p);
                for i in 0..m {
                    let xi = if i < d { row[i] } else { F::one() };
                    g[i] = g[i] + r * xi;
                    for j in i..m {
                        let xj = if j < d { row[j] } else { F::one() };
                        h[i * m + j] = h[i * m + j] + s * xi * xj;
                    }
                }
            }
            for i in 0..d {
                g[i] = g[i] + model.weights[i];
                h[i * m + i] = h[i * m + i] + F::one();
            }
            for i in 0..m {
                for j in 0..i {
                    h[i * m + j] = h[j * m + i];
                }
            }
            if g.iter().all(|v| v.abs() < tol) {
                break;
            }
            let step = linalg::solve(h, g.clone())
                .ok_or_else(|| Error::Model("logistic regression Hessian is singular".into()))?;
            // Backtracking keeps the objective non-increasing.
            let mut scale = F::one();
            let mut accepted = false;
            for _ in 0..30 {
                let cand = Self {
                    weights: model.weights.iter().zip(&step).map(|(&w, &s)| w - scale * s).collect(),
                    intercept: model.intercept - scale * step[d],
                    n_iter: model.n_iter,
                };
                let cand_obj = cand.objective(x, &y, c);
                if cand_obj <= obj {
                    model = cand;
                    obj = cand_obj;
                    accepted = true;
                    break;
                }
                scale = scale * F::of(0.5);
            }
            let max_step = step.iter().fold(F::zero(), |a, s| a.max(s.abs())) * scale;
            if !accepted || max_step < tol {
                break;
            }
        }
        Ok(model)
    }

    pub fn positive_proba(&self, x: &Matrix<F>) -> Vec<F> {
        x.rows_iter().map(|r| sigmoid(self.margin(r))).collect()
    }
}
