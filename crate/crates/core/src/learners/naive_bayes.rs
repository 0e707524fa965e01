use serde::{Deserialize, Serialize};

use super::spec::{LearnerSpec, ParamReader};
use crate::error::Result;
use crate::matrix::Matrix;
use crate::num::{self, Float};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianNbParams {
    /// Added to every variance, as a fraction of the largest feature variance.
    pub var_smoothing: f64,
}

impl Default for GaussianNbParams {
    fn default() -> Self {
        Self { var_smoothing: 1e-9 }
    }
}

impl GaussianNbParams {
    pub fn from_spec(spec: &LearnerSpec) -> Result<Self> {
        let mut r = ParamReader::new(spec);
        let var_smoothing = r.positive_float("var_smoothing", 1e-9)?;
        r.finish()?;
        Ok(Self { var_smoothing })
    }
}

/// Log prior, per-feature means and per-feature variances of one class.
type ClassStats<F> = (F, Vec<F>, Vec<F>);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct GaussianNbModel<F: Float> {
    /// Per class: (log prior, means, variances). `None` for an absent class.
    classes: [Option<ClassStats<F>>; 2],
}

impl<F: Float> GaussianNbModel<F> {
    pub fn fit(params: &GaussianNbParams, x: &Matrix<F>, y: &[u8]) -> Self {
        let d = x.ncols();
        let max_var = (0..d).map(|f| num::variance(&x.column(f))).fold(F::zero(), F::max);
        let mut eps = F::of(params.var_smoothing) * max_var;
        if !(eps > F::zero()) {
            eps = F::of(params.var_smoothing);
        }
        let n = F::of_usize(y.len());
        let classes = [0u8, 1u8].map(|c| {
            let rows: Vec<usize> = (0..y.len()).filter(|&i| y[i] == c).collect();
            if rows.is_empty() {
                return None;
            }
            let sub = x.select_rows(&rows);
            let means = (0..d).map(|f| num::mean(&sub.column(f))).collect();
            let vars = (0..d).map(|f| num::variance(&sub.column(f)) + eps).collect();
            Some(((F::of_usize(rows.len()) / n).ln(), means, vars))
        });
        Self { classes }
    }

    fn joint_log_likelihood(&self, class: usize, row: &[F]) -> F {
        let Some((log_prior, means, vars)) = &self.classes[class] else {
            return F::neg_infinity();
        };
        let two_pi = F::of(2.0 * std::f64::consts::PI);
        let half = F::of(0.5);
        let mut ll = *log_prior;
        for ((&v, &m), &s2) in row.iter().zip(means).zip(vars) {
            ll = ll - half * (two_pi * s2).ln() - half * (v - m) * (v - m) / s2;
        }
        ll
    }

    pub fn positive_proba(&self, x: &Matrix<F>) -> Vec<F> {
        x.rows_iter()
            .map(|row| {
                let l0 = self.joint_log_likelihood(0, row);
                let l1 = self.joint_log_likelihood(1, row);
                if l1 == F::neg_infinity() {
                    F::zero()
                } else if l0 == F::neg_infinity() {
                    F::one()
                } else {
                    num::sigmoid(l1 - l0)
                }
            })
            .collect()
    }
}
