//! Base classifiers behind one train/predict contract.
//!
//! Every learner is binary: `predict_proba` returns an `n x 2` matrix of
//! `[P(0), P(1)]` rows and `predict` is its argmax, with exact ties going to
//! class 0. Defaults follow the tuned settings used for the Pima benchmark:
//!
//! | algorithm | defaults |
//! |---|---|
//! | `decision_tree` | entropy, best splitter, `max_depth = 3`, `max_features = sqrt` (`auto`) |
//! | `random_forest` | 100 trees, entropy, `max_depth = 10`, all features, bootstrap |
//! | `extra_trees` | 50 trees, gini, `max_depth = 3`, `max_features = sqrt`, random thresholds |
//! | `knn` | `n_neighbors = 5`, Minkowski `p = 2`, uniform weights |
//! | `gaussian_nb` | `var_smoothing = 1e-9` |
//! | `mlp` | 100 ReLU units, Adam, batch 100, 100 epochs, adaptive step from 1e-3 |
//! | `adaboost` | SAMME.R, 100 stumps, learning rate 1 |
//! | `gradient_boosting` | deviance loss, 50 depth-3 Friedman-MSE trees, learning rate 0.1 |
//! | `svm` | sigmoid kernel, `gamma = scale`, `coef0 = 0`, `C = 1`, tolerance 1e-3 |
//! | `logistic_regression` | L2, `c = 1`, 1000 iterations, tolerance 1e-6 |
//! | `bagging` | 10 bootstrap replicates of an unpruned tree |

pub mod adaboost;
pub mod bagging;
pub mod decision_tree;
pub mod forest;
pub mod gradient_boosting;
pub mod knn;
mod linalg;
pub mod logistic;
pub mod mlp;
pub mod naive_bayes;
pub mod spec;
pub mod svm;
pub mod tree;

use std::path::Path;

use serde::{Deserialize, Serialize};

pub use spec::{Algorithm, HyperValue, LearnerSpec};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::matrix::{proba_from_positive, Matrix};
use crate::num::Float;
use crate::persist;

use adaboost::{AdaBoostModel, AdaBoostParams};
use bagging::{BaggingModel, BaggingParams};
use decision_tree::{DecisionTreeModel, DecisionTreeParams};
use forest::{ForestModel, ForestParams};
use gradient_boosting::{GradientBoostingModel, GradientBoostingParams};
use knn::{KnnModel, KnnParams};
use logistic::{LogisticModel, LogisticParams};
use mlp::{MlpModel, MlpParams};
use naive_bayes::{GaussianNbModel, GaussianNbParams};
use svm::{SvmModel, SvmParams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "", rename_all = "snake_case", tag = "kind", content = "state")]
pub enum FittedState<F: Float> {
    DecisionTree(DecisionTreeModel<F>),
    Forest(ForestModel<F>),
    Knn(KnnModel<F>),
    GaussianNb(GaussianNbModel<F>),
    Mlp(MlpModel<F>),
    Adaboost(AdaBoostModel<F>),
    GradientBoosting(GradientBoostingModel<F>),
    Svm(SvmModel<F>),
    LogisticRegression(LogisticModel<F>),
    Bagging(BaggingModel<F>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct TrainedModel<F: Float> {
    spec: LearnerSpec,
    n_features: usize,
    state: FittedState<F>,
}

pub(crate) fn validate_spec(spec: &LearnerSpec) -> Result<()> {
    match spec.algorithm {
        Algorithm::DecisionTree => DecisionTreeParams::from_spec(spec).map(drop),
        Algorithm::RandomForest => ForestParams::from_spec(spec, ForestParams::random_forest()).map(drop),
        Algorithm::ExtraTrees => ForestParams::from_spec(spec, ForestParams::extra_trees()).map(drop),
        Algorithm::Knn => KnnParams::from_spec(spec).map(drop),
        Algorithm::GaussianNb => GaussianNbParams::from_spec(spec).map(drop),
        Algorithm::Mlp => MlpParams::from_spec(spec).map(drop),
        Algorithm::Adaboost => AdaBoostParams::from_spec(spec).map(drop),
        Algorithm::GradientBoosting => GradientBoostingParams::from_spec(spec).map(drop),
        Algorithm::Svm => SvmParams::from_spec(spec).map(drop),
        Algorithm::LogisticRegression => LogisticParams::from_spec(spec).map(drop),
        Algorithm::Bagging => BaggingParams::from_spec(spec).map(drop),
    }
}

/// Fits `spec` on `ds`. Deterministic in `(spec, ds)`, seed included.
pub fn train<F: Float>(spec: &LearnerSpec, ds: &Dataset<F>) -> Result<TrainedModel<F>> {
    if ds.is_empty() {
        return Err(Error::Data("cannot train on an empty dataset".into()));
    }
    let x = ds.features();
    let y = ds.labels();
    let seed = spec.seed;
    let state = match spec.algorithm {
        Algorithm::DecisionTree => {
            FittedState::DecisionTree(DecisionTreeModel::fit(&DecisionTreeParams::from_spec(spec)?, x, y, seed))
        }
        Algorithm::RandomForest => FittedState::Forest(ForestModel::fit(
            &ForestParams::from_spec(spec, ForestParams::random_forest())?,
            x,
            y,
            seed,
        )),
        Algorithm::ExtraTrees => FittedState::Forest(ForestModel::fit(
            &ForestParams::from_spec(spec, ForestParams::extra_trees())?,
            x,
            y,
            seed,
        )),
        Algorithm::Knn => FittedState::Knn(KnnModel::fit(&KnnParams::from_spec(spec)?, x, y)),
        Algorithm::GaussianNb => {
            FittedState::GaussianNb(GaussianNbModel::fit(&GaussianNbParams::from_spec(spec)?, x, y))
        }
        Algorithm::Mlp => FittedState::Mlp(MlpModel::fit(&MlpParams::from_spec(spec)?, x, y, seed)?),
        Algorithm::Adaboost => FittedState::Adaboost(AdaBoostModel::fit(&AdaBoostParams::from_spec(spec)?, x, y, seed)),
        Algorithm::GradientBoosting => FittedState::GradientBoosting(GradientBoostingModel::fit(
            &GradientBoostingParams::from_spec(spec)?,
            x,
            y,
            seed,
        )?),
        Algorithm::Svm => FittedState::Svm(SvmModel::fit(&SvmParams::from_spec(spec)?, x, y)?.0),
        Algorithm::LogisticRegression => {
            FittedState::LogisticRegression(LogisticModel::fit(&LogisticParams::from_spec(spec)?, x, y)?)
        }
        Algorithm::Bagging => FittedState::Bagging(BaggingModel::fit(&BaggingParams::from_spec(spec)?, ds, seed)?),
    };
    Ok(TrainedModel { spec: spec.clone(), n_features: ds.n_features(), state })
}

impl<F: Float> TrainedModel<F> {
    /// Wraps an already fitted state, e.g. a hand-built logistic model.
    pub fn from_state(spec: LearnerSpec, n_features: usize, state: FittedState<F>) -> Self {
        Self { spec, n_features, state }
    }

    pub fn spec(&self) -> &LearnerSpec {
        &self.spec
    }

    pub fn state(&self) -> &FittedState<F> {
        &self.state
    }

    pub fn n_features_expected(&self) -> usize {
        self.n_features
    }

    fn check(&self, x: &Matrix<F>) -> Result<()> {
        if x.ncols() != self.n_features && x.nrows() > 0 {
            return Err(Error::ShapeMismatch { expected: self.n_features, got: x.ncols() });
        }
        Ok(())
    }

    /// `P(class 1)` per row.
    pub fn positive_proba(&self, x: &Matrix<F>) -> Result<Vec<F>> {
        self.check(x)?;
        Ok(match &self.state {
            FittedState::DecisionTree(m) => m.positive_proba(x),
            FittedState::Forest(m) => m.positive_proba(x),
            FittedState::Knn(m) => m.positive_proba(x),
            FittedState::GaussianNb(m) => m.positive_proba(x),
            FittedState::Mlp(m) => m.positive_proba(x),
            FittedState::Adaboost(m) => m.positive_proba(x),
            FittedState::GradientBoosting(m) => m.positive_proba(x),
            FittedState::Svm(m) => m.positive_proba(x),
            FittedState::LogisticRegression(m) => m.positive_proba(x),
            FittedState::Bagging(m) => m.positive_proba(x)?,
        })
    }

    pub fn predict_proba(&self, x: &Matrix<F>) -> Result<Matrix<F>> {
        Ok(proba_from_positive(&self.positive_proba(x)?))
    }

    pub fn predict(&self, x: &Matrix<F>) -> Result<Vec<u8>> {
        let p = self.predict_proba(x)?;
        Ok(p.rows_iter().map(|r| u8::from(r[1] > r[0])).collect())
    }

    pub fn to_json(&self) -> Result<String> {
        persist::to_json::<_, F>("trained-model", self)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        persist::from_json::<_, F>("trained-model", text)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        persist::write(path, &self.to_json()?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&persist::read(path)?)
    }
}
