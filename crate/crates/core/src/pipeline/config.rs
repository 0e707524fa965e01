//! Experiment configuration: a TOML document plus `key=value` overrides.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::dataset::Schema;
use crate::error::{Error, Result};
use crate::genetic::GaConfig;
use crate::learners::{Algorithm, HyperValue, LearnerSpec};
use crate::rng;
use crate::stacking::{Level1Feature, Level1Mode, StackSpec};

pub const CONFIG_VERSION: u32 = 1;

/// Display name of the stacked row in reports.
pub const STACK_ROW_NAME: &str = "Suggest Method (ST-GA)";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_version")]
    pub version: u32,
    #[serde(default = "default_seed")]
    pub master_seed: u64,
    /// Fit preprocessing and run the GA on the whole dataset before splitting,
    /// and build the stack's level-1 data naively. Reproduces the optimistic
    /// protocol; leaks test information by design.
    #[serde(default)]
    pub paper_faithful: bool,
    pub dataset: DatasetConfig,
    #[serde(default)]
    pub preprocessing: PreprocessConfig,
    #[serde(default)]
    pub split: SplitConfig,
    #[serde(default = "default_learners")]
    pub learners: Vec<NamedLearner>,
    #[serde(default)]
    pub stack: StackConfig,
    #[serde(default)]
    pub ga: GaSection,
    #[serde(default)]
    pub report: ReportConfig,
    /// Directory that relative paths are resolved against.
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

fn default_version() -> u32 {
    CONFIG_VERSION
}

fn default_seed() -> u64 {
    42
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetConfig {
    pub path: PathBuf,
    #[serde(default = "yes")]
    pub has_header: bool,
    /// File column names; empty means "take them from the header row".
    #[serde(default)]
    pub columns: Vec<String>,
    pub label: String,
    #[serde(default)]
    pub missing_as_zero: Vec<String>,
}

impl DatasetConfig {
    pub fn pima(path: impl Into<PathBuf>) -> Self {
        let schema = Schema::pima();
        let missing = schema.missing_as_zero_columns().iter().map(|&c| schema.column_names()[c].clone()).collect();
        Self {
            path: path.into(),
            has_header: true,
            columns: Vec::new(),
            label: schema.label_name().to_string(),
            missing_as_zero: missing,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PreprocessConfig {
    pub impute: bool,
    pub clip: bool,
    pub iqr_multiplier: f64,
    /// Z-score every predictor with training-set mean and deviation.
    pub standardize: bool,
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        Self { impute: true, clip: true, iqr_multiplier: 1.5, standardize: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SplitConfig {
    pub holdout_fraction: f64,
    pub kfold: Vec<usize>,
    pub stratified: bool,
}

impl Default for SplitConfig {
    fn default() -> Self {
        Self { holdout_fraction: 0.7, kfold: vec![5, 10, 15], stratified: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NamedLearner {
    pub name: String,
    pub algorithm: Algorithm,
    #[serde(default)]
    pub hyperparameters: BTreeMap<String, HyperValue>,
    /// Sub-stream of the master seed.
    #[serde(default)]
    pub seed: u64,
}

impl NamedLearner {
    pub fn new(name: &str, algorithm: Algorithm) -> Self {
        Self { name: name.to_string(), algorithm, hyperparameters: BTreeMap::new(), seed: 0 }
    }

    pub fn spec(&self) -> LearnerSpec {
        LearnerSpec { algorithm: self.algorithm, hyperparameters: self.hyperparameters.clone(), seed: self.seed }
    }
}

/// The nine benchmark learners in report order.
pub fn default_learners() -> Vec<NamedLearner> {
    [
        ("RF", Algorithm::RandomForest),
        ("KNN", Algorithm::Knn),
        ("MLP", Algorithm::Mlp),
        ("Ada boost", Algorithm::Adaboost),
        ("D tree Classifier", Algorithm::DecisionTree),
        ("NB", Algorithm::GaussianNb),
        ("GBC", Algorithm::GradientBoosting),
        ("SVM", Algorithm::Svm),
        ("Extra Tree", Algorithm::ExtraTrees),
    ]
    .into_iter()
    .enumerate()
    .map(|(i, (n, a))| NamedLearner { seed: i as u64, ..NamedLearner::new(n, a) })
    .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StackConfig {
    pub enabled: bool,
    pub name: String,
    /// Names from `learners` used as base learners; empty means all of them.
    pub base: Vec<String>,
    pub meta: LearnerSpec,
    pub level1_mode: Level1Mode,
    pub level1_feature_kind: Level1Feature,
}

impl Default for StackConfig {
    fn default() -> Self {
        Self {
            enabled: true,
            name: STACK_ROW_NAME.to_string(),
            base: Vec::new(),
            meta: LearnerSpec::new(Algorithm::GradientBoosting),
            level1_mode: Level1Mode::default(),
            level1_feature_kind: Level1Feature::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GaSection {
    pub enabled: bool,
    /// Folds of the wrapper's internal cross-validation.
    pub cv_k: usize,
    /// Also train the individual benchmark learners on the selected columns.
    pub apply_to_learners: bool,
    pub wrapper: LearnerSpec,
    pub params: GaConfig,
}

impl Default for GaSection {
    fn default() -> Self {
        Self {
            enabled: true,
            cv_k: 5,
            apply_to_learners: false,
            wrapper: LearnerSpec::new(Algorithm::LogisticRegression),
            params: GaConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Json,
    Csv,
    Markdown,
}

impl ReportFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ReportFormat::Json => "json",
            ReportFormat::Csv => "csv",
            ReportFormat::Markdown => "md",
        }
    }
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            other => Err(Error::Config(format!("unknown report format {other:?} (json, csv, markdown)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReportConfig {
    pub formats: Vec<ReportFormat>,
    /// Wall-clock seconds per model. Off by default so reports are byte-stable.
    pub include_timing: bool,
    /// Also compute the per-feature table (single-feature accuracy, selection frequency).
    pub feature_table: bool,
}

impl Default for ReportConfig {
    fn default() -> Self {
        Self {
            formats: vec![ReportFormat::Json, ReportFormat::Csv, ReportFormat::Markdown],
            include_timing: false,
            feature_table: true,
        }
    }
}

/// Seed streams derived from the master seed.
pub mod stream {
    pub const SPLIT: u64 = 1;
    pub const FOLDS: u64 = 2;
    pub const GA: u64 = 3;
    pub const STACK_FOLDS: u64 = 4;
    pub const LEARNERS: u64 = 5;
    pub const META: u64 = 6;
}

impl ExperimentConfig {
    /// Default Pima experiment reading `data_path`.
    pub fn pima(data_path: impl Into<PathBuf>) -> Self {
        Self {
            version: CONFIG_VERSION,
            master_seed: default_seed(),
            paper_faithful: false,
            dataset: DatasetConfig::pima(data_path),
            preprocessing: PreprocessConfig::default(),
            split: SplitConfig::default(),
            learners: default_learners(),
            stack: StackConfig::default(),
            ga: GaSection::default(),
            report: ReportConfig::default(),
            base_dir: None,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(format!("config: {}", e.message())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a config file; relative dataset paths resolve against its directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::from_toml(&text)?;
        cfg.base_dir = path.parent().map(Path::to_path_buf);
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(format!("config: {e}")))
    }

    /// Applies `a.b.c=value`. Array elements are addressed by index
    /// (`learners.0.seed=3`). Values parse as TOML, falling back to a bare
    /// string. The key must name a field of the configuration.
    pub fn apply_override(&mut self, assignment: &str) -> Result<()> {
        let (key, raw) = assignment
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("override {assignment:?} is not key=value")))?;
        let key = key.trim();
        let value = parse_value(raw.trim());
        let mut doc = toml::Value::try_from(&*self).map_err(|e| Error::Config(format!("config: {e}")))?;
        let path: Vec<&str> = key.split('.').collect();
        if path.iter().any(|p| p.is_empty()) {
            return Err(Error::Config(format!("override key {key:?} is malformed")));
        }
        set_path(&mut doc, &path, value).map_err(|m| Error::Config(format!("--set {key}: {m}")))?;
        let base_dir = self.base_dir.take();
        let mut next: Self =
            doc.try_into().map_err(|e: toml::de::Error| Error::Config(format!("--set {key}: {}", e.message())))?;
        next.base_dir = base_dir.clone();
        next.validate().map_err(|e| Error::Config(format!("--set {key}: {e}")))?;
        self.base_dir = base_dir;
        *self = next;
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.version != CONFIG_VERSION {
            return bad(format!("config version {} is not supported (expected {CONFIG_VERSION})", self.version));
        }
        if self.master_seed > i64::MAX as u64 {
            return bad("master_seed must fit in a signed 64-bit integer".into());
        }
        if self.learners.is_empty() && !self.stack.enabled {
            return bad("enable the stack or list at least one learner".into());
        }
        let f = self.split.holdout_fraction;
        if !(f > 0.0 && f < 1.0) {
            return bad(format!("split.holdout_fraction must be in (0, 1), got {f}"));
        }
        if let Some(k) = self.split.kfold.iter().find(|&&k| k < 2) {
            return bad(format!("split.kfold values must be at least 2, got {k}"));
        }
        if !(self.preprocessing.iqr_multiplier > 0.0) {
            return bad("preprocessing.iqr_multiplier must be positive".into());
        }
        let mut names = std::collections::BTreeSet::new();
        for l in &self.learners {
            if !names.insert(l.name.as_str()) {
                return bad(format!("learner name {:?} is used twice", l.name));
            }
            l.spec().validate().map_err(|e| Error::Config(format!("learner {:?}: {e}", l.name)))?;
        }
        if self.stack.enabled {
            if let Some(n) = self.stack.base.iter().find(|n| !names.contains(n.as_str())) {
                return bad(format!("stack.base names unknown learner {n:?}"));
            }
            self.stack_spec().validate()?;
        }
        if self.ga.enabled {
            self.ga.params.validate()?;
            self.ga.wrapper.validate()?;
            if self.ga.cv_k < 2 {
                return bad("ga.cv_k must be at least 2".into());
            }
        }
        Ok(())
    }

    pub fn data_path(&self) -> PathBuf {
        match &self.base_dir {
            Some(dir) if self.dataset.path.is_relative() => dir.join(&self.dataset.path),
            _ => self.dataset.path.clone(),
        }
    }

    /// Column layout, reading names from the file's header when the config lists none.
    pub fn schema(&self) -> Result<Schema> {
        let columns = if self.dataset.columns.is_empty() {
            if !self.dataset.has_header {
                return Err(Error::Config("dataset.columns is required when the file has no header".into()));
            }
            let path = self.data_path();
            let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
            let first = text.lines().next().ok_or_else(|| Error::Data(format!("{} is empty", path.display())))?;
            first.split(',').map(|s| s.trim().to_string()).collect()
        } else {
            self.dataset.columns.clone()
        };
        Schema::from_names(columns, &self.dataset.label, &self.dataset.missing_as_zero)
    }

    fn seeded(&self, spec: &LearnerSpec, stream: u64) -> LearnerSpec {
        let seed = rng::derive_seed(rng::derive_seed(self.master_seed, stream), spec.seed);
        LearnerSpec { seed, ..spec.clone() }
    }

    /// Benchmark learners with seeds resolved against the master seed.
    pub fn learner_specs(&self) -> Vec<(String, LearnerSpec)> {
        self.learners.iter().map(|l| (l.name.clone(), self.seeded(&l.spec(), stream::LEARNERS))).collect()
    }

    /// The stack with resolved seeds; naive level-1 data in paper-faithful mode.
    pub fn stack_spec(&self) -> StackSpec {
        let all = self.learner_specs();
        let base_specs = if self.stack.base.is_empty() {
            all.into_iter().map(|(_, s)| s).collect()
        } else {
            self.stack
                .base
                .iter()
                .filter_map(|n| all.iter().find(|(name, _)| name == n).map(|(_, s)| s.clone()))
                .collect()
        };
        StackSpec {
            base_specs,
            meta_spec: self.seeded(&self.stack.meta, stream::META),
            level1_mode: if self.paper_faithful { Level1Mode::Naive } else { self.stack.level1_mode },
            level1_feature_kind: self.stack.level1_feature_kind,
            fold_seed: rng::derive_seed(self.master_seed, stream::STACK_FOLDS),
        }
    }

    /// GA parameters seeded from the master seed and a per-run index.
    pub fn ga_config(&self, run: u64) -> GaConfig {
        GaConfig {
            seed: rng::derive_seed(rng::derive_seed(self.master_seed, stream::GA), run),
            ..self.ga.params.clone()
        }
    }

    /// SHA-256 of the canonical TOML form.
    pub fn hash(&self) -> Result<String> {
        Ok(hex::encode(Sha256::digest(self.to_toml()?.as_bytes())))
    }
}

fn parse_value(raw: &str) -> toml::Value {
    toml::from_str::<toml::Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}

fn set_path(node: &mut toml::Value, path: &[&str], value: toml::Value) -> std::result::Result<(), String> {
    let (head, rest) = path.split_first().expect("non-empty path");
    match node {
        toml::Value::Table(t) => {
            if rest.is_empty() {
                // Absent optional fields are allowed here; unknown ones fail on deserialization.
                t.insert(head.to_string(), value);
                return Ok(());
            }
            let child = t.get_mut(*head).ok_or_else(|| format!("unknown key {head:?}"))?;
            set_path(child, rest, value)
        }
        toml::Value::Array(a) => {
            let i: usize = head.parse().map_err(|_| format!("{head:?} is not an array index"))?;
            let len = a.len();
            let child = a.get_mut(i).ok_or_else(|| format!("index {i} out of range (length {len})"))?;
            if rest.is_empty() {
                *child = value;
                Ok(())
            } else {
                set_path(child, rest, value)
            }
        }
        _ => Err(format!("{head:?} is not inside a table")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> ExperimentConfig {
        ExperimentConfig::pima("data/pima.csv")
    }

    #[test]
    fn toml_round_trip() {
        let c = cfg();
        let back = ExperimentConfig::from_toml(&c.to_toml().unwrap()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn minimal_file_takes_defaults() {
        let c = ExperimentConfig::from_toml("[dataset]\npath = \"x.csv\"\nlabel = \"Outcome\"\n").unwrap();
        assert_eq!(c.learners.len(), 9);
        assert_eq!(c.split.kfold, vec![5, 10, 15]);
        assert_eq!(c.ga.params, GaConfig::default());
        assert_eq!(c.stack.level1_mode, Level1Mode::OutOfFold { k: 5 });
    }

    #[test]
    fn overrides_reach_nested_keys() {
        let mut c = cfg();
        c.apply_override("master_seed=7").unwrap();
        c.apply_override("ga.params.maxgen=10").unwrap();
        c.apply_override("split.kfold=[5]").unwrap();
        c.apply_override("learners.1.hyperparameters.n_neighbors=3").unwrap();
        c.apply_override("stack.level1_mode.mode=naive").unwrap();
        c.apply_override("ga.params.mutation_rate=0.2").unwrap();
        c.apply_override("dataset.path=other file.csv").unwrap();
        assert_eq!(c.master_seed, 7);
        assert_eq!(c.ga.params.maxgen, 10);
        assert_eq!(c.ga.params.mutation_rate, Some(0.2));
        assert_eq!(c.split.kfold, vec![5]);
        assert_eq!(c.learners[1].hyperparameters["n_neighbors"], HyperValue::Int(3));
        assert_eq!(c.stack.level1_mode, Level1Mode::Naive);
        assert_eq!(c.dataset.path, PathBuf::from("other file.csv"));
    }

    #[test]
    fn overrides_reject_unknown_keys() {
        let mut c = cfg();
        for bad in [
            "nope=1",
            "ga.params.bogus=1",
            "ga.nothing.deep=1",
            "learners.40.seed=1",
            "learners.0.hyperparameters.zzz=1",
            "seed",
        ] {
            let before = c.clone();
            assert!(matches!(c.apply_override(bad), Err(Error::Config(_))), "{bad}");
            assert_eq!(c, before);
        }
        assert!(c.apply_override("split.holdout_fraction=1.5").is_err());
    }

    #[test]
    fn hash_tracks_content() {
        let a = cfg();
        let mut b = cfg();
        assert_eq!(a.hash().unwrap(), b.hash().unwrap());
        b.master_seed = 1;
        assert_ne!(a.hash().unwrap(), b.hash().unwrap());
        assert_eq!(a.hash().unwrap().len(), 64);
    }

    #[test]
    fn seeds_follow_the_master_seed() {
        let a = cfg();
        let b = ExperimentConfig { master_seed: 9, ..cfg() };
        assert_ne!(a.learner_specs()[0].1.seed, b.learner_specs()[0].1.seed);
        assert_ne!(a.learner_specs()[0].1.seed, a.learner_specs()[1].1.seed);
        assert_eq!(a.stack_spec().base_specs.len(), 9);
        assert_eq!(a.stack_spec().base_specs[0], a.learner_specs()[0].1);
    }

    #[test]
    fn paper_faithful_forces_naive_stacking() {
        let c = ExperimentConfig { paper_faithful: true, ..cfg() };
        assert_eq!(c.stack_spec().level1_mode, Level1Mode::Naive);
    }
}
