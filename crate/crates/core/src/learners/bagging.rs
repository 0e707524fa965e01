use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::spec::{Algorithm, LearnerSpec, ParamReader};
use super::{train, TrainedModel};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::num::Float;
use crate::rng;

/// Redraws allowed when a bootstrap replicate misses a class the inner
/// learner needs.
const MAX_REDRAWS: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct BaggingParams {
    pub n_estimators: usize,
    pub base_estimator: LearnerSpec,
}

impl BaggingParams {
    /// Unpruned decision tree over all features.
    pub fn default_base() -> LearnerSpec {
        LearnerSpec::new(Algorithm::DecisionTree).with("max_depth", "none").with("max_features", "all")
    }

    pub fn from_spec(spec: &LearnerSpec) -> Result<Self> {
        let mut r = ParamReader::new(spec);
        let n_estimators = r.count("n_estimators", 10)?;
        let base_estimator = r.spec("base_estimator", Self::default_base())?;
        r.finish()?;
        base_estimator.validate()?;
        Ok(Self { n_estimators, base_estimator })
    }
}

/// Majority vote over models trained on bootstrap replicates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct BaggingModel<F: Float> {
    pub members: Vec<TrainedModel<F>>,
}

impl<F: Float> BaggingModel<F> {
    pub fn fit(params: &BaggingParams, ds: &Dataset<F>, seed: u64) -> Result<Self> {
        let n = ds.n_samples();
        let needs_both = !params.base_estimator.algorithm.fits_single_class();
        let mut members = Vec::with_capacity(params.n_estimators);
        for b in 0..params.n_estimators {
            let mut rng = rng::derived_rng(seed, b as u64);
            let mut idx: Vec<usize>;
            let mut tries = 0;
            loop {
                idx = (0..n).map(|_| rng.random_range(0..n)).collect();
                let pos = idx.iter().filter(|&&i| ds.labels()[i] == 1).count();
                if !needs_both || (pos > 0 && pos < n) || tries >= MAX_REDRAWS {
                    break;
                }
                tries += 1;
            }
            let spec = params.base_estimator.clone().with_seed(rng::derive_seed(seed, 1_000_000 + b as u64));
            let member =
                train(&spec, &ds.subset(&idx)).map_err(|e| Error::Model(format!("bagging member {b}: {e}")))?;
            members.push(member);
        }
        Ok(Self { members })
    }

    pub fn positive_proba(&self, x: &Matrix<F>) -> Result<Vec<F>> {
        let mut votes = vec![0usize; x.nrows()];
        for m in &self.members {
            for (v, label) in votes.iter_mut().zip(m.predict(x)?) {
                *v += label as usize;
            }
        }
        let total = F::of_usize(self.members.len().max(1));
        Ok(votes.into_iter().map(|v| F::of_usize(v) / total).collect())
    }
}
