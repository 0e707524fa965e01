//! Random forest (bootstrap + per-split feature sampling) and extremely
//! randomized trees (full sample, random thresholds). Both predict by
//! majority vote of their trees; the positive probability is the fraction
//! of trees voting for class 1.

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::decision_tree::{read_criterion, read_max_features};
use super::spec::{LearnerSpec, ParamReader};
use super::tree::{Criterion, MaxFeatures, Splitter, Tree, TreeConfig};
use crate::error::Result;
use crate::matrix::Matrix;
use crate::num::Float;
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForestParams {
    pub n_estimators: usize,
    pub criterion: Criterion,
    pub max_depth: Option<usize>,
    pub max_features: MaxFeatures,
    pub bootstrap: bool,
    pub splitter: Splitter,
}

impl ForestParams {
    /// 100 entropy trees of depth ≤ 10 over all features, bootstrapped.
    pub fn random_forest() -> Self {
        Self {
            n_estimators: 100,
            criterion: Criterion::Entropy,
            max_depth: Some(10),
            max_features: MaxFeatures::All,
            bootstrap: true,
            splitter: Splitter::Best,
        }
    }

    /// 50 gini trees of depth ≤ 3, `sqrt` features, random thresholds.
    pub fn extra_trees() -> Self {
        Self {
            n_estimators: 50,
            criterion: Criterion::Gini,
            max_depth: Some(3),
            max_features: MaxFeatures::Sqrt,
            bootstrap: false,
            splitter: Splitter::Random,
        }
    }

    pub fn from_spec(spec: &LearnerSpec, defaults: Self) -> Result<Self> {
        let mut r = ParamReader::new(spec);
        let crit_default = if defaults.criterion == Criterion::Gini { "gini" } else { "entropy" };
        let mf_default = if defaults.max_features == MaxFeatures::All { "all" } else { "sqrt" };
        let n_estimators = r.count("n_estimators", defaults.n_estimators)?;
        let criterion = read_criterion(&mut r, crit_default)?;
        let max_depth = r.optional_count("max_depth", defaults.max_depth)?;
        let max_features = read_max_features(&mut r, mf_default)?;
        r.finish()?;
        Ok(Self { n_estimators, criterion, max_depth, max_features, ..defaults })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct ForestModel<F: Float> {
    pub trees: Vec<Tree<F>>,
}

impl<F: Float> ForestModel<F> {
    pub fn fit(params: &ForestParams, x: &Matrix<F>, y: &[u8], seed: u64) -> Self {
        let n = y.len();
        let target: Vec<F> = y.iter().map(|&v| F::of_usize(v as usize)).collect();
        let cfg = TreeConfig {
            criterion: params.criterion,
            max_depth: params.max_depth,
            max_features: params.max_features,
            splitter: params.splitter,
            min_samples_split: 2,
        };
        let trees = (0..params.n_estimators)
            .map(|t| {
                let mut rng = rng::derived_rng(seed, t as u64);
                let weight = if params.bootstrap {
                    let mut w = vec![F::zero(); n];
                    for _ in 0..n {
                        let i = rng.random_range(0..n);
                        w[i] = w[i] + F::one();
                    }
                    w
                } else {
                    vec![F::one(); n]
                };
                Tree::fit(x, &target, &weight, cfg, &mut rng)
            })
            .collect();
        Self { trees }
    }

    pub fn positive_proba(&self, x: &Matrix<F>) -> Vec<F> {
        let half = F::of(0.5);
        let total = F::of_usize(self.trees.len().max(1));
        x.rows_iter()
            .map(|row| {
                let votes = self.trees.iter().filter(|t| t.predict_row(row) > half).count();
                F::of_usize(votes) / total
            })
            .collect()
    }
}
