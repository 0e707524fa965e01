//! Real-valued AdaBoost (SAMME.R) over depth-one stumps, two-class case.
//!
//! Each round fits a weighted gini stump, reads its leaf class
//! probabilities `p`, and adds `h(x) = 0.5 * ln(p1 / p0)` to the ensemble.
//! Sample weights are multiplied by `exp(-lr * 0.5 * ln(p_y / p_not_y))`.
//! The ensemble's positive probability is `sigmoid(mean_m ln(p1_m / p0_m))`.

use serde::{Deserialize, Serialize};

use super::spec::{LearnerSpec, ParamReader};
use super::tree::{Criterion, MaxFeatures, Splitter, Tree, TreeConfig};
use crate::error::Result;
use crate::matrix::Matrix;
use crate::num::{sigmoid, Float};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaBoostParams {
    pub n_estimators: usize,
    pub learning_rate: f64,
}

impl Default for AdaBoostParams {
    fn default() -> Self {
        Self { n_estimators: 100, learning_rate: 1.0 }
    }
}

impl AdaBoostParams {
    pub fn from_spec(spec: &LearnerSpec) -> Result<Self> {
        let mut r = ParamReader::new(spec);
        let n_estimators = r.count("n_estimators", 100)?;
        let learning_rate = r.positive_float("learning_rate", 1.0)?;
        r.choice("algorithm", "SAMME.R", &["SAMME.R"])?;
        r.finish()?;
        Ok(Self { n_estimators, learning_rate })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct AdaBoostModel<F: Float> {
    pub stumps: Vec<Tree<F>>,
    /// Training positive rate; the prediction when no round was accepted.
    pub prior: F,
}

fn stump_config() -> TreeConfig {
    TreeConfig {
        criterion: Criterion::Gini,
        max_depth: Some(1),
        max_features: MaxFeatures::All,
        splitter: Splitter::Best,
        min_samples_split: 2,
    }
}

fn clip<F: Float>(p: F) -> F {
    let eps = F::epsilon();
    p.max(eps).min(F::one() - eps)
}

/// `ln(p1 / p0)` of a clipped leaf probability.
fn log_odds<F: Float>(p1: F) -> F {
    let p = clip(p1);
    p.ln() - (F::one() - p).ln()
}

impl<F: Float> AdaBoostModel<F> {
    pub fn fit(params: &AdaBoostParams, x: &Matrix<F>, y: &[u8], seed: u64) -> Self {
        let n = y.len();
        let target: Vec<F> = y.iter().map(|&v| F::of_usize(v as usize)).collect();
        let prior = target.iter().copied().sum::<F>() / F::of_usize(n.max(1));
        let mut w = vec![F::one() / F::of_usize(n.max(1)); n];
        let lr = F::of(params.learning_rate);
        let half = F::of(0.5);
        let mut stumps = Vec::new();
        for round in 0..params.n_estimators {
            let stump = Tree::fit(x, &target, &w, stump_config(), &mut rng::derived_rng(seed, round as u64));
            let probs: Vec<F> = x.rows_iter().map(|r| stump.predict_row(r)).collect();
            let total: F = w.iter().copied().sum();
            let err = probs
                .iter()
                .zip(y)
                .zip(&w)
                .filter(|((&p, &t), _)| u8::from(p > half) != t)
                .map(|(_, &wi)| wi)
                .sum::<F>()
                / total;
            if err >= half {
                break;
            }
            stumps.push(stump);
            if err <= F::zero() {
                break;
            }
            for i in 0..n {
                let lo = log_odds(probs[i]);
                let signed = if y[i] == 1 { lo } else { -lo };
                w[i] = w[i] * (-lr * half * signed).exp();
            }
            let s: F = w.iter().copied().sum();
            if !(s > F::zero()) || !s.is_finite() {
                break;
            }
            for wi in &mut w {
                *wi = *wi / s;
            }
        }
        Self { stumps, prior }
    }

    /// `sum_m 0.5 * ln(p1_m / p0_m)` for one row.
    pub fn decision(&self, row: &[F]) -> F {
        self.stumps.iter().map(|s| F::of(0.5) * log_odds(s.predict_row(row))).sum()
    }

    pub fn positive_proba(&self, x: &Matrix<F>) -> Vec<F> {
        if self.stumps.is_empty() {
            return vec![self.prior; x.nrows()];
        }
        let m = F::of_usize(self.stumps.len());
        x.rows_iter().map(|r| sigmoid(F::of(2.0) * self.decision(r) / m)).collect()
    }

    /// Positive probabilities using only the first `rounds` stumps.
    pub fn staged_positive_proba(&self, x: &Matrix<F>, rounds: usize) -> Vec<F> {
        let truncated = Self { stumps: self.stumps[..rounds.min(self.stumps.len())].to_vec(), prior: self.prior };
        truncated.positive_proba(x)
    }
}
