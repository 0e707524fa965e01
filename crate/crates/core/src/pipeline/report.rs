//! Report model and its JSON, CSV and Markdown renderings.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::learners::Algorithm;
use crate::metrics::{ConfusionMatrix, Metric};
use crate::stacking::{Level1Feature, Level1Mode};

use super::config::{ExperimentConfig, ReportFormat};

pub const REPORT_VERSION: u32 = 1;

/// Published figure for GA + logistic-regression feature selection on Pima,
/// carried in every feature-selection summary as a comparison point only.
pub const REFERENCE_ACCURACY: f64 = 0.93;
pub const REFERENCE_FEATURES: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Protocol {
    Holdout,
    Kfold,
}

/// Where fitted state came from, so a reader can tell leakage-free runs from
/// optimistic ones.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Settings {
    pub paper_faithful: bool,
    /// `training_split` or `whole_dataset`.
    pub preprocessing_scope: String,
    /// `disabled`, `training_split` or `whole_dataset`.
    pub ga_scope: String,
    pub ga_applied_to_learners: bool,
    pub stack_mode: Level1Mode,
    pub level1_feature_kind: Level1Feature,
    pub meta_algorithm: Algorithm,
    pub n_samples: usize,
    pub n_features: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelResult {
    pub name: String,
    pub algorithm: String,
    pub n_features: usize,
    pub accuracy: Metric,
    pub sensitivity: Metric,
    pub specificity: Metric,
    /// Harmonic mean of sensitivity and specificity.
    pub fscore: Metric,
    /// Conventional precision/recall F1.
    pub f1: Metric,
    pub auc: Metric,
    pub confusion: Option<ConfusionMatrix>,
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seconds: Option<f64>,
}

impl ModelResult {
    pub fn failed(name: &str, algorithm: &str, n_features: usize, error: String) -> Self {
        Self {
            name: name.to_string(),
            algorithm: algorithm.to_string(),
            n_features,
            accuracy: Metric::Undefined,
            sensitivity: Metric::Undefined,
            specificity: Metric::Undefined,
            fscore: Metric::Undefined,
            f1: Metric::Undefined,
            auc: Metric::Undefined,
            confusion: None,
            error: Some(error),
            seconds: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KfoldRow {
    pub name: String,
    pub algorithm: String,
    pub k: usize,
    pub mean_accuracy: Metric,
    /// Population standard deviation of the fold accuracies.
    pub std: Metric,
    pub fold_accuracies: Vec<Metric>,
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seconds: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaskRecord {
    /// `holdout`, `global` or `k=<k> fold=<i>`.
    pub scope: String,
    pub selected: Vec<String>,
    pub n_selected: usize,
    pub cv_accuracy: f64,
    pub full_mask_cv_accuracy: f64,
    pub generations: usize,
    pub evaluations: usize,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureRow {
    pub name: String,
    pub single_feature_accuracy: f64,
    pub selection_frequency: f64,
    pub in_best_mask: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferencePoint {
    pub accuracy: f64,
    pub n_features: usize,
    pub note: String,
}

impl Default for ReferencePoint {
    fn default() -> Self {
        Self {
            accuracy: REFERENCE_ACCURACY,
            n_features: REFERENCE_FEATURES,
            note: "published result for GA + logistic-regression selection on Pima; for comparison only".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSelection {
    pub wrapper: Algorithm,
    pub cv_k: usize,
    pub masks: Vec<MaskRecord>,
    /// Per-feature table for the holdout run; empty for k-fold reports.
    pub features: Vec<FeatureRow>,
    pub reference: ReferencePoint,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub report_version: u32,
    pub protocol: Protocol,
    pub master_seed: u64,
    pub config_hash: String,
    pub settings: Settings,
    pub holdout: Vec<ModelResult>,
    pub kfold: Vec<KfoldRow>,
    pub feature_selection: Option<FeatureSelection>,
    pub config: ExperimentConfig,
}

impl Report {
    pub fn from_json(text: &str) -> Result<Self> {
        let r: Self = serde_json::from_str(text)?;
        if r.report_version != REPORT_VERSION {
            return Err(Error::Serde(format!("unsupported report version {}", r.report_version)));
        }
        Ok(r)
    }

    /// Model names in k-fold order, each listed once.
    pub fn kfold_models(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for row in &self.kfold {
            if !out.contains(&row.name.as_str()) {
                out.push(&row.name);
            }
        }
        out
    }

    pub fn kfold_ks(&self) -> Vec<usize> {
        let mut ks: Vec<usize> = self.kfold.iter().map(|r| r.k).collect();
        ks.sort_unstable();
        ks.dedup();
        ks
    }
}

pub fn render_report(report: &Report, format: ReportFormat) -> Result<String> {
    match format {
        ReportFormat::Json => Ok(serde_json::to_string_pretty(report)? + "\n"),
        ReportFormat::Csv => render_csv(report),
        ReportFormat::Markdown => Ok(render_markdown(report)),
    }
}

/// Renders by format name (`json`, `csv`, `markdown`).
pub fn render_report_named(report: &Report, format: &str) -> Result<String> {
    render_report(report, format.parse()?)
}

fn render_csv(report: &Report) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::Serde(e.to_string());
    w.write_record([
        "section",
        "model",
        "algorithm",
        "k",
        "accuracy",
        "sensitivity",
        "specificity",
        "fscore",
        "f1",
        "auc",
        "std",
        "error",
    ])
    .map_err(csv_err)?;
    for r in &report.holdout {
        w.write_record([
            "holdout".to_string(),
            r.name.clone(),
            r.algorithm.clone(),
            String::new(),
            r.accuracy.to_string(),
            r.sensitivity.to_string(),
            r.specificity.to_string(),
            r.fscore.to_string(),
            r.f1.to_string(),
            r.auc.to_string(),
            String::new(),
            r.error.clone().unwrap_or_default(),
        ])
        .map_err(csv_err)?;
    }
    for r in &report.kfold {
        w.write_record([
            "kfold".to_string(),
            r.name.clone(),
            r.algorithm.clone(),
            r.k.to_string(),
            r.mean_accuracy.to_string(),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
            r.std.to_string(),
            r.error.clone().unwrap_or_default(),
        ])
        .map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Serde(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn pct(m: Metric) -> String {
    match m.value() {
        Some(v) => format!("{:.2}", v * 100.0),
        None => "n/a".into(),
    }
}

fn render_markdown(report: &Report) -> String {
    let mut s = String::new();
    let title = match report.protocol {
        Protocol::Holdout => "holdout",
        Protocol::Kfold => "k-fold cross-validation",
    };
    let _ = writeln!(s, "# Evaluation report ({title})\n");
    let st = &report.settings;
    let _ = writeln!(s, "- master seed: {}", report.master_seed);
    let _ = writeln!(s, "- config hash: `{}`", report.config_hash);
    let _ = writeln!(s, "- samples: {}, predictors: {}", st.n_samples, st.n_features);
    let mode = match st.stack_mode {
        Level1Mode::OutOfFold { k } => format!("out-of-fold (k = {k})"),
        Level1Mode::Naive => "naive (level-0 models score their own training rows)".into(),
    };
    let kind = match st.level1_feature_kind {
        Level1Feature::Probability => "probability",
        Level1Feature::Label => "label",
    };
    let _ = writeln!(s, "- stacking: {mode}, {kind} level-1 features, meta-learner `{}`", st.meta_algorithm);
    let _ = writeln!(s, "- preprocessing fitted on: {}", st.preprocessing_scope.replace('_', " "));
    let _ = writeln!(s, "- feature selection run on: {}", st.ga_scope.replace('_', " "));
    if st.paper_faithful {
        let _ = writeln!(s, "- **optimistic protocol**: fitted state has seen the evaluation rows");
    }
    if report.protocol == Protocol::Holdout || !report.holdout.is_empty() {
        let _ = writeln!(s, "\n## Holdout evaluation (%)\n");
        let _ = writeln!(s, "| Model | Accuracy | Sensitivity | Specificity | F-score | F1 | AUC |");
        let _ = writeln!(s, "|---|---|---|---|---|---|---|");
        for r in &report.holdout {
            match &r.error {
                None => {
                    let _ = writeln!(
                        s,
                        "| {} | {} | {} | {} | {} | {} | {} |",
                        r.name,
                        pct(r.accuracy),
                        pct(r.sensitivity),
                        pct(r.specificity),
                        pct(r.fscore),
                        pct(r.f1),
                        pct(r.auc)
                    );
                }
                Some(e) => {
                    let _ = writeln!(s, "| {} | failed: {} | | | | | |", r.name, e.replace('|', "/"));
                }
            }
        }
    }
    if !report.kfold.is_empty() {
        let ks = report.kfold_ks();
        let _ = writeln!(s, "\n## K-fold mean accuracy (%)\n");
        let header: Vec<String> = ks.iter().map(|k| format!("K fold={k}")).collect();
        let _ = writeln!(s, "| Model | {} |", header.join(" | "));
        let _ = writeln!(s, "|---|{}", "---|".repeat(ks.len()));
        for name in report.kfold_models() {
            let cells: Vec<String> = ks
                .iter()
                .map(|&k| match report.kfold.iter().find(|r| r.name == name && r.k == k) {
                    Some(r) if r.error.is_none() => format!("{} ± {}", pct(r.mean_accuracy), pct(r.std)),
                    Some(_) => "failed".into(),
                    None => String::new(),
                })
                .collect();
            let _ = writeln!(s, "| {name} | {} |", cells.join(" | "));
        }
    }
    if let Some(fs) = &report.feature_selection {
        let _ = writeln!(s, "\n## Feature selection (wrapper `{}`, {}-fold CV)\n", fs.wrapper, fs.cv_k);
        let _ = writeln!(s, "| Scope | Selected | Count | CV accuracy | All-feature CV accuracy | Generations |");
        let _ = writeln!(s, "|---|---|---|---|---|---|");
        for m in &fs.masks {
            match &m.error {
                None => {
                    let _ = writeln!(
                        s,
                        "| {} | {} | {} | {:.4} | {:.4} | {} |",
                        m.scope,
                        m.selected.join(", "),
                        m.n_selected,
                        m.cv_accuracy,
                        m.full_mask_cv_accuracy,
                        m.generations
                    );
                }
                Some(e) => {
                    let _ = writeln!(s, "| {} | failed: {} | | | | |", m.scope, e.replace('|', "/"));
                }
            }
        }
        if !fs.features.is_empty() {
            let _ = writeln!(s, "\n| Feature | Single-feature CV accuracy | Selection frequency | In best mask |");
            let _ = writeln!(s, "|---|---|---|---|");
            for f in &fs.features {
                let _ = writeln!(
                    s,
                    "| {} | {:.4} | {:.2} | {} |",
                    f.name,
                    f.single_feature_accuracy,
                    f.selection_frequency,
                    if f.in_best_mask { "yes" } else { "no" }
                );
            }
        }
        let _ = writeln!(
            s,
            "\nReference point: {:.0}% accuracy with {} features ({}).",
            fs.reference.accuracy * 100.0,
            fs.reference.n_features,
            fs.reference.note
        );
    }
    s
}
