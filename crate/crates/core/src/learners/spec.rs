use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    DecisionTree,
    RandomForest,
    ExtraTrees,
    Knn,
    GaussianNb,
    Mlp,
    Adaboost,
    GradientBoosting,
    Svm,
    LogisticRegression,
    Bagging,
}

impl Algorithm {
    pub const ALL: [Algorithm; 11] = [
        Algorithm::DecisionTree,
        Algorithm::RandomForest,
        Algorithm::ExtraTrees,
        Algorithm::Knn,
        Algorithm::GaussianNb,
        Algorithm::Mlp,
        Algorithm::Adaboost,
        Algorithm::GradientBoosting,
        Algorithm::Svm,
        Algorithm::LogisticRegression,
        Algorithm::Bagging,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::DecisionTree => "decision_tree",
            Algorithm::RandomForest => "random_forest",
            Algorithm::ExtraTrees => "extra_trees",
            Algorithm::Knn => "knn",
            Algorithm::GaussianNb => "gaussian_nb",
            Algorithm::Mlp => "mlp",
            Algorithm::Adaboost => "adaboost",
            Algorithm::GradientBoosting => "gradient_boosting",
            Algorithm::Svm => "svm",
            Algorithm::LogisticRegression => "logistic_regression",
            Algorithm::Bagging => "bagging",
        }
    }

    /// Whether the algorithm has a meaningful fit on single-class data.
    pub fn fits_single_class(self) -> bool {
        !matches!(self, Algorithm::Mlp | Algorithm::GradientBoosting | Algorithm::Svm | Algorithm::LogisticRegression)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown algorithm {s:?}")))
    }
}

/// A hyperparameter value. Bagging takes a nested spec for its inner learner.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum HyperValue {
    Bool(bool),
    Int(i64),
    Float(f64),
    Text(String),
    Spec(Box<LearnerSpec>),
}

impl fmt::Display for HyperValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HyperValue::Bool(b) => write!(f, "{b}"),
            HyperValue::Int(i) => write!(f, "{i}"),
            HyperValue::Float(x) => write!(f, "{x}"),
            HyperValue::Text(s) => f.write_str(s),
            HyperValue::Spec(s) => write!(f, "{}", s.algorithm),
        }
    }
}

impl From<bool> for HyperValue {
    fn from(v: bool) -> Self {
        HyperValue::Bool(v)
    }
}

impl From<i64> for HyperValue {
    fn from(v: i64) -> Self {
        HyperValue::Int(v)
    }
}

impl From<i32> for HyperValue {
    fn from(v: i32) -> Self {
        HyperValue::Int(v.into())
    }
}

impl From<usize> for HyperValue {
    fn from(v: usize) -> Self {
        HyperValue::Int(v as i64)
    }
}

impl From<f64> for HyperValue {
    fn from(v: f64) -> Self {
        HyperValue::Float(v)
    }
}

impl From<&str> for HyperValue {
    fn from(v: &str) -> Self {
        HyperValue::Text(v.to_string())
    }
}

impl From<LearnerSpec> for HyperValue {
    fn from(v: LearnerSpec) -> Self {
        HyperValue::Spec(Box::new(v))
    }
}

/// Algorithm identity, hyperparameter overrides and seed. Keys missing from
/// `hyperparameters` take the algorithm's defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LearnerSpec {
    pub algorithm: Algorithm,
    #[serde(default)]
    pub hyperparameters: BTreeMap<String, HyperValue>,
    #[serde(default)]
    pub seed: u64,
}

impl LearnerSpec {
    pub fn new(algorithm: Algorithm) -> Self {
        Self { algorithm, hyperparameters: BTreeMap::new(), seed: 0 }
    }

    pub fn with(mut self, key: &str, value: impl Into<HyperValue>) -> Self {
        self.hyperparameters.insert(key.to_string(), value.into());
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Checks every key and value against the algorithm's parameter set.
    pub fn validate(&self) -> Result<()> {
        super::validate_spec(self)
    }
}

/// Typed access to a spec's hyperparameter map that tracks which keys were
/// consumed, so leftovers can be rejected as unknown.
pub(crate) struct ParamReader<'a> {
    spec: &'a LearnerSpec,
    seen: BTreeSet<&'static str>,
}

impl<'a> ParamReader<'a> {
    pub fn new(spec: &'a LearnerSpec) -> Self {
        Self { spec, seen: BTreeSet::new() }
    }

    fn raw(&mut self, key: &'static str) -> Option<&'a HyperValue> {
        self.seen.insert(key);
        self.spec.hyperparameters.get(key)
    }

    fn err(&self, msg: String) -> Error {
        Error::hyper(self.spec.algorithm, msg)
    }

    pub fn float(&mut self, key: &'static str, default: f64) -> Result<f64> {
        match self.raw(key) {
            None => Ok(default),
            Some(HyperValue::Float(v)) => Ok(*v),
            Some(HyperValue::Int(v)) => Ok(*v as f64),
            Some(other) => Err(self.err(format!("{key} must be a number, got {other}"))),
        }
    }

    pub fn positive_float(&mut self, key: &'static str, default: f64) -> Result<f64> {
        let v = self.float(key, default)?;
        if v > 0.0 && v.is_finite() {
            Ok(v)
        } else {
            Err(self.err(format!("{key} must be positive, got {v}")))
        }
    }

    pub fn count(&mut self, key: &'static str, default: usize) -> Result<usize> {
        match self.raw(key) {
            None => Ok(default),
            Some(HyperValue::Int(v)) if *v >= 1 => Ok(*v as usize),
            Some(other) => Err(self.err(format!("{key} must be a positive integer, got {other}"))),
        }
    }

    /// Positive integer or the text `"none"` for no limit.
    pub fn optional_count(&mut self, key: &'static str, default: Option<usize>) -> Result<Option<usize>> {
        match self.raw(key) {
            None => Ok(default),
            Some(HyperValue::Int(v)) if *v >= 1 => Ok(Some(*v as usize)),
            Some(HyperValue::Text(t)) if t == "none" => Ok(None),
            Some(other) => Err(self.err(format!("{key} must be a positive integer or \"none\", got {other}"))),
        }
    }

    pub fn choice(
        &mut self,
        key: &'static str,
        default: &'static str,
        allowed: &[&'static str],
    ) -> Result<&'static str> {
        match self.raw(key) {
            None => Ok(default),
            Some(HyperValue::Text(t)) => allowed
                .iter()
                .copied()
                .find(|a| a == t)
                .ok_or_else(|| self.err(format!("{key} must be one of {allowed:?}, got {t:?}"))),
            Some(other) => Err(self.err(format!("{key} must be one of {allowed:?}, got {other}"))),
        }
    }

    /// A number, or one of the allowed keywords.
    pub fn float_or_choice(
        &mut self,
        key: &'static str,
        default: &'static str,
        allowed: &[&'static str],
    ) -> Result<std::result::Result<f64, &'static str>> {
        match self.raw(key) {
            None => Ok(Err(default)),
            Some(HyperValue::Float(v)) if *v > 0.0 => Ok(Ok(*v)),
            Some(HyperValue::Int(v)) if *v > 0 => Ok(Ok(*v as f64)),
            Some(HyperValue::Text(t)) => allowed
                .iter()
                .copied()
                .find(|a| a == t)
                .map(Err)
                .ok_or_else(|| self.err(format!("{key} must be positive or one of {allowed:?}, got {t:?}"))),
            Some(other) => Err(self.err(format!("{key} must be positive or one of {allowed:?}, got {other}"))),
        }
    }

    pub fn spec(&mut self, key: &'static str, default: LearnerSpec) -> Result<LearnerSpec> {
        match self.raw(key) {
            None => Ok(default),
            Some(HyperValue::Spec(s)) => Ok((**s).clone()),
            Some(HyperValue::Text(t)) => Ok(LearnerSpec::new(t.parse()?)),
            Some(other) => Err(self.err(format!("{key} must be a learner spec, got {other}"))),
        }
    }

    /// Rejects keys that no accessor asked for.
    pub fn finish(self) -> Result<()> {
        let unknown: Vec<&String> =
            self.spec.hyperparameters.keys().filter(|k| !self.seen.contains(k.as_str())).collect();
        if unknown.is_empty() {
            Ok(())
        } else {
            Err(self.err(format!("unknown hyperparameter(s) {unknown:?}")))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn algorithm_names_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(a.name().parse::<Algorithm>().unwrap(), a);
        }
        assert!("svc".parse::<Algorithm>().is_err());
    }

    #[test]
    fn reader_rejects_unknown_keys() {
        let spec = LearnerSpec::new(Algorithm::Knn).with("n_neighbors", 3).with("bogus", 1);
        let mut r = ParamReader::new(&spec);
        assert_eq!(r.count("n_neighbors", 5).unwrap(), 3);
        assert!(r.finish().is_err());
    }

    #[test]
    fn reader_type_errors() {
        let spec = LearnerSpec::new(Algorithm::DecisionTree).with("max_depth", "deep").with("criterion", "mse");
        let mut r = ParamReader::new(&spec);
        assert!(r.optional_count("max_depth", Some(3)).is_err());
        assert!(r.choice("criterion", "gini", &["gini", "entropy"]).is_err());
    }

    #[test]
    fn spec_serde_keeps_value_kinds() {
        let spec = LearnerSpec::new(Algorithm::Bagging)
            .with("n_estimators", 7)
            .with("base_estimator", LearnerSpec::new(Algorithm::Knn).with("n_neighbors", 1))
            .with_seed(9);
        let json = serde_json::to_string(&spec).unwrap();
        let back: LearnerSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, spec);
    }
}
