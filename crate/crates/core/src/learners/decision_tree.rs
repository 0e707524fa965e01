use serde::{Deserialize, Serialize};

use super::spec::{LearnerSpec, ParamReader};
use super::tree::{Criterion, MaxFeatures, Splitter, Tree, TreeConfig};
use crate::error::Result;
use crate::matrix::Matrix;
use crate::num::Float;
use crate::rng;

/// Defaults: entropy, best splitter, depth 3, `sqrt` features per split.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecisionTreeParams {
    pub criterion: Criterion,
    pub max_depth: Option<usize>,
    pub max_features: MaxFeatures,
    pub min_samples_split: usize,
}

impl Default for DecisionTreeParams {
    fn default() -> Self {
        Self {
            criterion: Criterion::Entropy,
            max_depth: Some(3),
            max_features: MaxFeatures::Sqrt,
            min_samples_split: 2,
        }
    }
}

pub(crate) fn read_criterion(r: &mut ParamReader<'_>, default: &'static str) -> Result<Criterion> {
    Ok(match r.choice("criterion", default, &["gini", "entropy"])? {
        "gini" => Criterion::Gini,
        _ => Criterion::Entropy,
    })
}

pub(crate) fn read_max_features(r: &mut ParamReader<'_>, default: &'static str) -> Result<MaxFeatures> {
    let s = r.choice("max_features", default, &["all", "sqrt", "auto"])?;
    Ok(MaxFeatures::parse(s).expect("choice restricted to known values"))
}

impl DecisionTreeParams {
    pub fn from_spec(spec: &LearnerSpec) -> Result<Self> {
        let d = Self::default();
        let mut r = ParamReader::new(spec);
        let criterion = read_criterion(&mut r, "entropy")?;
        let max_depth = r.optional_count("max_depth", d.max_depth)?;
        let max_features = read_max_features(&mut r, "sqrt")?;
        r.choice("splitter", "best", &["best"])?;
        let min_samples_split = r.count("min_samples_split", 2)?;
        r.finish()?;
        Ok(Self { criterion, max_depth, max_features, min_samples_split })
    }

    pub(crate) fn tree_config(&self) -> TreeConfig {
        TreeConfig {
            criterion: self.criterion,
            max_depth: self.max_depth,
            max_features: self.max_features,
            splitter: Splitter::Best,
            min_samples_split: self.min_samples_split,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct DecisionTreeModel<F: Float> {
    pub tree: Tree<F>,
}

impl<F: Float> DecisionTreeModel<F> {
    pub fn fit(params: &DecisionTreeParams, x: &Matrix<F>, y: &[u8], seed: u64) -> Self {
        let target: Vec<F> = y.iter().map(|&v| F::of_usize(v as usize)).collect();
        let w = vec![F::one(); y.len()];
        let tree = Tree::fit(x, &target, &w, params.tree_config(), &mut rng::rng_from_seed(seed));
        Self { tree }
    }

    pub fn positive_proba(&self, x: &Matrix<F>) -> Vec<F> {
        x.rows_iter().map(|r| self.tree.predict_row(r)).collect()
    }
}
