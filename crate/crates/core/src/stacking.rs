//! Two-level stacked generalization.
//!
//! Level-0 learners turn a training set into a derived dataset `D'` with one
//! column per learner; the level-1 meta-learner is fit on `D'`. In
//! out-of-fold mode each `D'` entry comes from a model that never saw that
//! row; naive mode fills `D'` from models fit on all of the training data.

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dataset::{fold_plan_for_labels, Dataset, Schema};
use crate::error::{Error, Result};
use crate::learners::{self, Algorithm, LearnerSpec, TrainedModel};
use crate::matrix::{proba_from_positive, Matrix};
use crate::num::Float;
use crate::persist;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum Level1Mode {
    OutOfFold { k: usize },
    Naive,
}

impl Default for Level1Mode {
    fn default() -> Self {
        Level1Mode::OutOfFold { k: 5 }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Level1Feature {
    Label,
    #[default]
    Probability,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StackSpec {
    pub base_specs: Vec<LearnerSpec>,
    pub meta_spec: LearnerSpec,
    #[serde(default)]
    pub level1_mode: Level1Mode,
    #[serde(default)]
    pub level1_feature_kind: Level1Feature,
    /// Seeds the out-of-fold assignment.
    #[serde(default)]
    pub fold_seed: u64,
}

impl StackSpec {
    /// Out-of-fold (k = 5) probability stacking with a gradient-boosting meta-learner.
    pub fn new(base_specs: Vec<LearnerSpec>) -> Self {
        Self {
            base_specs,
            meta_spec: LearnerSpec::new(Algorithm::GradientBoosting),
            level1_mode: Level1Mode::default(),
            level1_feature_kind: Level1Feature::default(),
            fold_seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.base_specs.is_empty() {
            return Err(Error::Config("a stack needs at least one base learner".into()));
        }
        if let Level1Mode::OutOfFold { k } = self.level1_mode {
            if k < 2 {
                return Err(Error::Config(format!("out-of-fold stacking needs k >= 2, got {k}")));
            }
        }
        for spec in self.base_specs.iter().chain([&self.meta_spec]) {
            spec.validate()?;
        }
        Ok(())
    }

    /// Column names of `D'`: `z<t>_<algorithm>`.
    pub fn level1_names(&self) -> Vec<String> {
        self.base_specs.iter().enumerate().map(|(t, s)| format!("z{t}_{}", s.algorithm)).collect()
    }

    fn level1_schema(&self) -> Schema {
        let mut names = self.level1_names();
        names.push("label".into());
        let label = names.len() - 1;
        Schema::new(names, label, BTreeSet::new()).expect("level-1 names are unique")
    }
}

fn level1_column<F: Float>(model: &TrainedModel<F>, x: &Matrix<F>, kind: Level1Feature) -> Result<Vec<F>> {
    Ok(match kind {
        Level1Feature::Probability => model.positive_proba(x)?,
        Level1Feature::Label => model.predict(x)?.into_iter().map(|l| F::of_usize(l as usize)).collect(),
    })
}

/// Which model produced each `D'` entry and which rows that model saw.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Level1Trace {
    /// Training `row_ids` per fitted level-0 model.
    pub model_rows: Vec<Vec<usize>>,
    /// Per model: `(learner index, fold)`; fold is `None` in naive mode.
    pub model_origin: Vec<(usize, Option<usize>)>,
    /// `source[i][t]` indexes `model_rows` for entry `z_it`.
    pub source: Vec<Vec<usize>>,
}

impl Level1Trace {
    /// Entries `(i, t)` whose model was trained on row `i` itself.
    pub fn leaks<F: Float>(&self, ds: &Dataset<F>) -> Vec<(usize, usize)> {
        let seen: Vec<BTreeSet<usize>> = self.model_rows.iter().map(|r| r.iter().copied().collect()).collect();
        let mut out = Vec::new();
        for (i, row) in self.source.iter().enumerate() {
            for (t, &m) in row.iter().enumerate() {
                if seen[m].contains(&ds.row_ids()[i]) {
                    out.push((i, t));
                }
            }
        }
        out
    }
}

struct Level1Build<F: Float> {
    data: Dataset<F>,
    trace: Level1Trace,
    /// Full-data models, kept in naive mode so they need not be refit.
    full_models: Option<Vec<TrainedModel<F>>>,
}

fn build<F: Float>(spec: &StackSpec, ds: &Dataset<F>) -> Result<Level1Build<F>> {
    spec.validate()?;
    if !ds.has_both_classes() {
        return Err(Error::SingleClass("stacking input".into()));
    }
    let m = ds.n_samples();
    let t_count = spec.base_specs.len();
    let mut z = Matrix::zeros(m, t_count);
    let mut trace = Level1Trace { model_rows: Vec::new(), model_origin: Vec::new(), source: vec![vec![0; t_count]; m] };
    let mut full_models = None;
    match spec.level1_mode {
        Level1Mode::Naive => {
            let mut models = Vec::with_capacity(t_count);
            for (t, base) in spec.base_specs.iter().enumerate() {
                let model = learners::train(base, ds)?;
                let col = level1_column(&model, ds.features(), spec.level1_feature_kind)?;
                let id = trace.model_rows.len();
                trace.model_rows.push(ds.row_ids().to_vec());
                trace.model_origin.push((t, None));
                for (i, &v) in col.iter().enumerate().take(m) {
                    z.set(i, t, v);
                    trace.source[i][t] = id;
                }
                models.push(model);
            }
            full_models = Some(models);
        }
        Level1Mode::OutOfFold { k } => {
            let plan = fold_plan_for_labels(ds.labels(), k, true, spec.fold_seed)?;
            for fold in 0..k {
                let train_idx = plan.train_indices(fold);
                let test_idx = plan.test_indices(fold);
                let train = ds.subset(&train_idx);
                if !train.has_both_classes() {
                    return Err(Error::DegenerateFold {
                        fold,
                        message: "the training part holds a single class".into(),
                    });
                }
                let held_out = ds.features().select_rows(&test_idx);
                for (t, base) in spec.base_specs.iter().enumerate() {
                    let model = learners::train(base, &train)?;
                    let col = level1_column(&model, &held_out, spec.level1_feature_kind)?;
                    let id = trace.model_rows.len();
                    trace.model_rows.push(train.row_ids().to_vec());
                    trace.model_origin.push((t, Some(fold)));
                    for (j, &i) in test_idx.iter().enumerate() {
                        z.set(i, t, col[j]);
                        trace.source[i][t] = id;
                    }
                }
            }
        }
    }
    let data = Dataset::with_row_ids(z, ds.labels().to_vec(), spec.level1_schema(), ds.row_ids().to_vec())?;
    Ok(Level1Build { data, trace, full_models })
}

/// Builds `D'`: `m` rows, one column per base learner, labels carried over.
pub fn build_level1_dataset<F: Float>(spec: &StackSpec, ds: &Dataset<F>) -> Result<Dataset<F>> {
    Ok(build(spec, ds)?.data)
}

/// [`build_level1_dataset`] plus provenance of every entry.
pub fn build_level1_traced<F: Float>(spec: &StackSpec, ds: &Dataset<F>) -> Result<(Dataset<F>, Level1Trace)> {
    let b = build(spec, ds)?;
    Ok((b.data, b.trace))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct StackModel<F: Float> {
    pub spec: StackSpec,
    pub base_models: Vec<TrainedModel<F>>,
    pub meta_model: TrainedModel<F>,
}

/// Fits the meta-learner on `D'` and the base learners on all of `ds`.
pub fn train_stack<F: Float>(spec: &StackSpec, ds: &Dataset<F>) -> Result<StackModel<F>> {
    let b = build(spec, ds)?;
    let meta_model = learners::train(&spec.meta_spec, &b.data)?;
    let base_models = match b.full_models {
        Some(models) => models,
        None => spec.base_specs.iter().map(|s| learners::train(s, ds)).collect::<Result<_>>()?,
    };
    Ok(StackModel { spec: spec.clone(), base_models, meta_model })
}

impl<F: Float> StackModel<F> {
    pub fn n_features_expected(&self) -> usize {
        self.base_models[0].n_features_expected()
    }

    /// The level-1 features the meta-learner sees for `x`.
    pub fn level1_features(&self, x: &Matrix<F>) -> Result<Matrix<F>> {
        let cols = self
            .base_models
            .iter()
            .map(|m| level1_column(m, x, self.spec.level1_feature_kind))
            .collect::<Result<Vec<_>>>()?;
        let mut z = Matrix::zeros(x.nrows(), cols.len());
        for (t, col) in cols.iter().enumerate() {
            for (i, &v) in col.iter().enumerate() {
                z.set(i, t, v);
            }
        }
        Ok(z)
    }

    pub fn positive_proba(&self, x: &Matrix<F>) -> Result<Vec<F>> {
        self.meta_model.positive_proba(&self.level1_features(x)?)
    }

    pub fn predict_proba(&self, x: &Matrix<F>) -> Result<Matrix<F>> {
        Ok(proba_from_positive(&self.positive_proba(x)?))
    }

    pub fn predict(&self, x: &Matrix<F>) -> Result<Vec<u8>> {
        self.meta_model.predict(&self.level1_features(x)?)
    }

    pub fn to_json(&self) -> Result<String> {
        persist::to_json::<_, F>("stack-model", self)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        persist::from_json::<_, F>("stack-model", text)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        persist::write(path, &self.to_json()?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&persist::read(path)?)
    }
}

/// `H(X) = h'(h_1(x), ..., h_T(x))`.
pub fn predict_stack<F: Float>(model: &StackModel<F>, x: &Matrix<F>) -> Result<Vec<u8>> {
    model.predict(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthetic;

    #[test]
    fn mode_serializes_with_tag() {
        let s = serde_json::to_string(&Level1Mode::OutOfFold { k: 5 }).unwrap();
        assert_eq!(s, r#"{"mode":"out_of_fold","k":5}"#);
        assert_eq!(serde_json::to_string(&Level1Mode::Naive).unwrap(), r#"{"mode":"naive"}"#);
    }

    #[test]
    fn rejects_bad_specs() {
        let empty = StackSpec::new(vec![]);
        assert!(matches!(empty.validate(), Err(Error::Config(_))));
        let mut one_fold = StackSpec::new(vec![LearnerSpec::new(Algorithm::Knn)]);
        one_fold.level1_mode = Level1Mode::OutOfFold { k: 1 };
        assert!(one_fold.validate().is_err());
    }

    #[test]
    fn degenerate_fold_is_named() {
        // A lone positive is dealt to fold 0, leaving that fold's training
        // part all negative.
        let mut ds = synthetic::label_noise::<f64>(12, 2, 0.0, 1);
        let mut labels = ds.labels().to_vec();
        labels[0] = 1;
        ds = Dataset::from_xy(ds.features().clone(), labels).unwrap();
        let mut spec = StackSpec::new(vec![LearnerSpec::new(Algorithm::GaussianNb)]);
        spec.level1_mode = Level1Mode::OutOfFold { k: 3 };
        match build_level1_dataset(&spec, &ds) {
            Err(Error::DegenerateFold { fold, .. }) => assert_eq!(fold, 0),
            other => panic!("expected a degenerate fold, got {other:?}"),
        }
    }
}
