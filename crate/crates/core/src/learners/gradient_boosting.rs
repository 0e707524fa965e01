//! Stagewise additive logistic model. Each stage fits a Friedman-MSE
//! regression tree to the residuals `y - p`, then replaces every leaf value
//! with the Newton step `sum(r) / sum(p (1 - p))` over the leaf's samples.

use serde::{Deserialize, Serialize};

use super::spec::{LearnerSpec, ParamReader};
use super::tree::{Criterion, MaxFeatures, Node, Splitter, Tree, TreeConfig};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::num::{sigmoid, Float};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradientBoostingParams {
    pub n_estimators: usize,
    pub learning_rate: f64,
    pub max_depth: usize,
}

impl Default for GradientBoostingParams {
    fn default() -> Self {
        Self { n_estimators: 50, learning_rate: 0.1, max_depth: 3 }
    }
}

impl GradientBoostingParams {
    pub fn from_spec(spec: &LearnerSpec) -> Result<Self> {
        let d = Self::default();
        let mut r = ParamReader::new(spec);
        let n_estimators = r.count("n_estimators", d.n_estimators)?;
        let learning_rate = r.positive_float("learning_rate", d.learning_rate)?;
        let max_depth = r.count("max_depth", d.max_depth)?;
        r.choice("loss", "deviance", &["deviance", "log_loss"])?;
        r.choice("criterion", "friedman_mse", &["friedman_mse"])?;
        r.finish()?;
        Ok(Self { n_estimators, learning_rate, max_depth })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct GradientBoostingModel<F: Float> {
    pub init: F,
    pub learning_rate: F,
    pub trees: Vec<Tree<F>>,
    /// Mean training deviance before any stage, then after each stage.
    pub train_deviance: Vec<F>,
}

/// Mean binomial deviance `2 * mean(log(1 + e^f) - y f)`.
pub fn deviance<F: Float>(y: &[F], raw: &[F]) -> F {
    let n = F::of_usize(y.len().max(1));
    let total: F = y
        .iter()
        .zip(raw)
        .map(|(&t, &f)| {
            let sp = if f > F::zero() { f + (-f).exp().ln_1p() } else { f.exp().ln_1p() };
            sp - t * f
        })
        .sum();
    F::of(2.0) * total / n
}

impl<F: Float> GradientBoostingModel<F> {
    pub fn fit(params: &GradientBoostingParams, x: &Matrix<F>, labels: &[u8], seed: u64) -> Result<Self> {
        let n = labels.len();
        let y: Vec<F> = labels.iter().map(|&l| F::of_usize(l as usize)).collect();
        let pos = y.iter().copied().sum::<F>();
        if pos.is_zero() || pos == F::of_usize(n) {
            return Err(Error::SingleClass("gradient_boosting".into()));
        }
        let prior = pos / F::of_usize(n);
        let init = (prior / (F::one() - prior)).ln();
        let lr = F::of(params.learning_rate);
        let cfg = TreeConfig {
            criterion: Criterion::FriedmanMse,
            max_depth: Some(params.max_depth),
            max_features: MaxFeatures::All,
            splitter: Splitter::Best,
            min_samples_split: 2,
        };
        let ones = vec![F::one(); n];
        let mut raw = vec![init; n];
        let mut train_deviance = vec![deviance(&y, &raw)];
        let mut trees = Vec::with_capacity(params.n_estimators);
        for stage in 0..params.n_estimators {
            let p: Vec<F> = raw.iter().map(|&f| sigmoid(f)).collect();
            let resid: Vec<F> = y.iter().zip(&p).map(|(&t, &pi)| t - pi).collect();
            let mut tree = Tree::fit(x, &resid, &ones, cfg, &mut rng::derived_rng(seed, stage as u64));
            let leaves: Vec<usize> = x.rows_iter().map(|r| tree.apply(r)).collect();
            let mut num = vec![F::zero(); tree.nodes().len()];
            let mut den = vec![F::zero(); tree.nodes().len()];
            for i in 0..n {
                num[leaves[i]] = num[leaves[i]] + resid[i];
                den[leaves[i]] = den[leaves[i]] + p[i] * (F::one() - p[i]);
            }
            for id in 0..tree.nodes().len() {
                if matches!(tree.nodes()[id], Node::Leaf { .. }) {
                    let v = if den[id].abs() < F::of(1e-150) { F::zero() } else { num[id] / den[id] };
                    tree.set_leaf_value(id, v);
                }
            }
            for (i, r) in raw.iter_mut().enumerate() {
                *r = *r + lr * tree.predict_row(x.row(i));
            }
            train_deviance.push(deviance(&y, &raw));
            trees.push(tree);
        }
        Ok(Self { init, learning_rate: lr, trees, train_deviance })
    }

    pub fn raw_score(&self, row: &[F]) -> F {
        self.init + self.trees.iter().map(|t| self.learning_rate * t.predict_row(row)).sum::<F>()
    }

    pub fn positive_proba(&self, x: &Matrix<F>) -> Vec<F> {
        x.rows_iter().map(|r| sigmoid(self.raw_score(r))).collect()
    }
}
