//! Experiment orchestration: preprocessing, GA feature selection, stacking
//! and the holdout / k-fold benchmark tables.
//!
//! By default every fitted quantity (imputation medians, IQR fences,
//! standardization, the GA mask, the stack) is learned from training rows
//! only. `paper_faithful` switches preprocessing and the GA to the whole
//! dataset and the stack to naive level-1 data.

pub mod config;
pub mod report;

use std::collections::BTreeSet;
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::dataset::{
    fold_plan_for_labels, load_csv, split_indices, Dataset, MedianImputer, OutlierClipper, ReplacementCounts,
    Standardizer,
};
use crate::error::{Error, Result};
use crate::genetic::{self, Chromosome, FitnessFn, GaRun, WrapperFitness};
use crate::learners::{self, LearnerSpec, TrainedModel};
use crate::metrics::{self, Metric, RocCurve};
use crate::num::Float;
use crate::persist;
use crate::rng;
use crate::stacking::{self, StackModel};

pub use config::{ExperimentConfig, ReportFormat};
pub use report::{render_report, render_report_named, Report};

use config::stream;
use report::{FeatureRow, FeatureSelection, KfoldRow, MaskRecord, ModelResult, Protocol, ReferencePoint, Settings};

/// Loads the configured dataset with its schema.
pub fn load_dataset<F: Float>(cfg: &ExperimentConfig) -> Result<Dataset<F>> {
    load_csv(&cfg.data_path(), &cfg.schema()?, cfg.dataset.has_header)
}

/// Fitted cleaning chain: IQR clipping, median imputation, standardization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Preprocessor<F: Float> {
    pub clipper: Option<OutlierClipper<F>>,
    pub imputer: Option<MedianImputer<F>>,
    pub standardizer: Option<Standardizer<F>>,
}

/// What one pass of the cleaning chain changed.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrepSummary {
    pub rows: usize,
    pub imputed: ReplacementCounts,
    pub clipped: ReplacementCounts,
    pub imputed_total: usize,
    pub clipped_total: usize,
}

impl<F: Float> Preprocessor<F> {
    /// Fits each enabled step on the output of the previous one. Outlier
    /// fences are fitted on observed values before zeros are imputed.
    pub fn fit(cfg: &config::PreprocessConfig, ds: &Dataset<F>) -> Result<Self> {
        let mut cur = ds.clone();
        let clipper = if cfg.clip {
            let c = OutlierClipper::fit_observed(&cur, cfg.iqr_multiplier)?;
            cur = c.transform(&cur).0;
            Some(c)
        } else {
            None
        };
        let imputer = if cfg.impute {
            let imp = MedianImputer::fit(&cur)?;
            cur = imp.transform(&cur).0;
            Some(imp)
        } else {
            None
        };
        let standardizer = cfg.standardize.then(|| Standardizer::fit(&cur));
        Ok(Self { clipper, imputer, standardizer })
    }

    pub fn transform(&self, ds: &Dataset<F>) -> (Dataset<F>, PrepSummary) {
        let mut cur = ds.clone();
        let mut summary = PrepSummary { rows: ds.n_samples(), ..PrepSummary::default() };
        if let Some(c) = &self.clipper {
            let (next, counts) = c.transform(&cur);
            cur = next;
            summary.clipped_total = counts.total();
            summary.clipped = counts;
        }
        if let Some(imp) = &self.imputer {
            let (next, counts) = imp.transform(&cur);
            cur = next;
            summary.imputed_total = counts.total();
            summary.imputed = counts;
        }
        if let Some(s) = &self.standardizer {
            cur = s.transform(&cur);
        }
        (cur, summary)
    }
}

/// Clipping and imputation fitted on and applied to the whole file, without
/// standardization: the `prep` step.
pub fn prepare_dataset<F: Float>(cfg: &ExperimentConfig, ds: &Dataset<F>) -> Result<(Dataset<F>, PrepSummary)> {
    let pc = config::PreprocessConfig { standardize: false, ..cfg.preprocessing.clone() };
    Ok(Preprocessor::fit(&pc, ds)?.transform(ds))
}

/// Row ids each stage was fitted on, for leakage audits.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub scope: String,
    pub test_rows: Vec<usize>,
    pub preprocess_rows: Vec<usize>,
    pub ga_rows: Vec<usize>,
    pub model_rows: Vec<usize>,
}

impl Provenance {
    /// Stages whose fitting rows intersect the evaluation rows.
    pub fn leaking_stages(&self) -> Vec<&'static str> {
        let test: BTreeSet<usize> = self.test_rows.iter().copied().collect();
        let hit = |rows: &[usize]| rows.iter().any(|r| test.contains(r));
        let mut out = Vec::new();
        if hit(&self.preprocess_rows) {
            out.push("preprocessing");
        }
        if hit(&self.ga_rows) {
            out.push("feature selection");
        }
        if hit(&self.model_rows) {
            out.push("model training");
        }
        out
    }
}

/// Everything needed to score new rows with a trained ST-GA stack.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct StGaArtifact<F: Float> {
    pub config_hash: String,
    pub feature_names: Vec<String>,
    pub preprocessor: Preprocessor<F>,
    /// Selected predictor indices, in file order.
    pub mask: Vec<usize>,
    pub stack: StackModel<F>,
}

impl<F: Float> StGaArtifact<F> {
    /// Cleans raw rows, applies the mask and scores them.
    pub fn positive_proba(&self, raw: &Dataset<F>) -> Result<Vec<F>> {
        self.stack.positive_proba(self.prepare(raw)?.features())
    }

    pub fn predict(&self, raw: &Dataset<F>) -> Result<Vec<u8>> {
        self.stack.predict(self.prepare(raw)?.features())
    }

    fn prepare(&self, raw: &Dataset<F>) -> Result<Dataset<F>> {
        let names = raw.schema().feature_names();
        if names != self.feature_names {
            return Err(Error::Config(format!(
                "model expects predictors {:?}, data has {:?}",
                self.feature_names, names
            )));
        }
        Ok(self.preprocessor.transform(raw).0.select_features(&self.mask))
    }

    pub fn to_json(&self) -> Result<String> {
        persist::to_json::<_, F>("st-ga-model", self)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        persist::from_json::<_, F>("st-ga-model", text)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        persist::write(path, &self.to_json()?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&persist::read(path)?)
    }
}

/// Result of one GA run on a training set.
#[derive(Debug, Clone)]
pub struct Selection {
    pub run: GaRun,
    pub mask: Vec<usize>,
    pub full_mask_cv_accuracy: f64,
    pub rows: Vec<usize>,
}

/// Runs the configured GA on `ds`; `run` picks the seed sub-stream.
pub fn select<F: Float>(cfg: &ExperimentConfig, ds: &Dataset<F>, run: u64) -> Result<Selection> {
    let ga = cfg.ga_config(run);
    let fitness = WrapperFitness::new(ds, cfg.ga.wrapper.clone(), cfg.ga.cv_k, rng::derive_seed(ga.seed, 1))?;
    let result = genetic::run_ga(&ga, ds.n_features(), &fitness)?;
    let full = fitness.evaluate(&Chromosome::ones(ds.n_features()))?;
    log::info!(
        "ga: {} features selected, cv accuracy {:.4} (all features {:.4}) after {} generations",
        result.best_chromosome.count_ones(),
        result.best_fitness,
        full,
        result.generations
    );
    Ok(Selection {
        mask: result.best_chromosome.selected(),
        run: result,
        full_mask_cv_accuracy: full,
        rows: ds.row_ids().to_vec(),
    })
}

/// Single-feature wrapper accuracy, final-population selection frequency
/// and best-mask membership per feature.
pub fn feature_report<F: Float>(
    ds: &Dataset<F>,
    wrapper: &LearnerSpec,
    cv_k: usize,
    seed: u64,
    ga_run: &GaRun,
) -> Result<Vec<FeatureRow>> {
    let fitness = WrapperFitness::new(ds, wrapper.clone(), cv_k, seed)?;
    let freq = ga_run.selection_frequency();
    let names = ds.schema().feature_names();
    (0..ds.n_features())
        .map(|f| {
            let mut bits = vec![false; ds.n_features()];
            bits[f] = true;
            Ok(FeatureRow {
                name: names[f].clone(),
                single_feature_accuracy: fitness.evaluate(&Chromosome::new(bits))?,
                selection_frequency: freq[f],
                in_best_mask: ga_run.best_chromosome.bits[f],
            })
        })
        .collect()
}

fn mask_record(scope: String, names: &[String], sel: &Result<Selection>) -> MaskRecord {
    match sel {
        Ok(s) => MaskRecord {
            scope,
            selected: s.mask.iter().map(|&i| names[i].clone()).collect(),
            n_selected: s.mask.len(),
            cv_accuracy: s.run.best_fitness,
            full_mask_cv_accuracy: s.full_mask_cv_accuracy,
            generations: s.run.generations,
            evaluations: s.run.evaluations,
            error: None,
        },
        Err(e) => MaskRecord {
            scope,
            selected: Vec::new(),
            n_selected: 0,
            cv_accuracy: 0.0,
            full_mask_cv_accuracy: 0.0,
            generations: 0,
            evaluations: 0,
            error: Some(e.to_string()),
        },
    }
}

fn settings<F: Float>(cfg: &ExperimentConfig, ds: &Dataset<F>) -> Settings {
    let spec = cfg.stack_spec();
    let scope = if cfg.paper_faithful { "whole_dataset" } else { "training_split" };
    Settings {
        paper_faithful: cfg.paper_faithful,
        preprocessing_scope: scope.into(),
        ga_scope: if cfg.ga.enabled { scope.into() } else { "disabled".into() },
        ga_applied_to_learners: cfg.ga.enabled && cfg.ga.apply_to_learners,
        stack_mode: spec.level1_mode,
        level1_feature_kind: spec.level1_feature_kind,
        meta_algorithm: spec.meta_spec.algorithm,
        n_samples: ds.n_samples(),
        n_features: ds.n_features(),
    }
}

fn base_report<F: Float>(cfg: &ExperimentConfig, ds: &Dataset<F>, protocol: Protocol) -> Result<Report> {
    let mut echo = cfg.clone();
    echo.base_dir = None;
    Ok(Report {
        report_version: report::REPORT_VERSION,
        protocol,
        master_seed: cfg.master_seed,
        config_hash: cfg.hash()?,
        settings: settings(cfg, ds),
        holdout: Vec::new(),
        kfold: Vec::new(),
        feature_selection: None,
        config: echo,
    })
}

fn evaluate_scores(
    name: &str,
    algorithm: &str,
    n_features: usize,
    y: &[u8],
    pred: &[u8],
    scores: &[f64],
) -> Result<(ModelResult, Option<RocCurve>)> {
    let cm = metrics::confusion(y, pred)?;
    let roc = metrics::roc_curve(y, scores).ok();
    let auc = roc.as_ref().map_or(Metric::Undefined, |c| Metric::Value(metrics::auc(c)));
    Ok((
        ModelResult {
            name: name.to_string(),
            algorithm: algorithm.to_string(),
            n_features,
            accuracy: metrics::accuracy(&cm),
            sensitivity: metrics::sensitivity(&cm),
            specificity: metrics::specificity(&cm),
            fscore: metrics::fscore(&cm),
            f1: metrics::f1(&cm),
            auc,
            confusion: Some(cm),
            error: None,
            seconds: None,
        },
        roc,
    ))
}

fn to_f64<F: Float>(v: Vec<F>) -> Vec<f64> {
    v.into_iter().map(Float::as_f64).collect()
}

/// Split of the raw data into training and evaluation rows plus the cleaned views.
struct Partition<F: Float> {
    train: Dataset<F>,
    test: Dataset<F>,
    preprocessor: Preprocessor<F>,
    preprocess_rows: Vec<usize>,
}

fn partition<F: Float>(
    cfg: &ExperimentConfig,
    raw: &Dataset<F>,
    train_idx: &[usize],
    test_idx: &[usize],
    global: Option<&Preprocessor<F>>,
) -> Result<Partition<F>> {
    let train_raw = raw.subset(train_idx);
    let test_raw = raw.subset(test_idx);
    let (preprocessor, preprocess_rows) = match global {
        Some(p) => (p.clone(), raw.row_ids().to_vec()),
        None => (Preprocessor::fit(&cfg.preprocessing, &train_raw)?, train_raw.row_ids().to_vec()),
    };
    Ok(Partition {
        train: preprocessor.transform(&train_raw).0,
        test: preprocessor.transform(&test_raw).0,
        preprocessor,
        preprocess_rows,
    })
}

fn clone_selection(sel: &Option<Result<Selection>>) -> Option<Result<Selection>> {
    sel.as_ref().map(|r| r.as_ref().cloned().map_err(|e| Error::Model(e.to_string())))
}

/// Whole-file preprocessing and GA result, in paper-faithful mode only.
type GlobalState<F> = (Preprocessor<F>, Option<Result<Selection>>);

fn global_state<F: Float>(cfg: &ExperimentConfig, raw: &Dataset<F>) -> Result<Option<GlobalState<F>>> {
    if !cfg.paper_faithful {
        return Ok(None);
    }
    let p = Preprocessor::fit(&cfg.preprocessing, raw)?;
    let sel = cfg.ga.enabled.then(|| select(cfg, &p.transform(raw).0, 0));
    Ok(Some((p, sel)))
}

/// The GA run the holdout protocol would use: on the cleaned training split,
/// or on the whole cleaned file in paper-faithful mode.
pub fn holdout_selection<F: Float>(cfg: &ExperimentConfig, raw: &Dataset<F>) -> Result<Selection> {
    if !cfg.ga.enabled {
        return Err(Error::Config("feature selection is disabled (set ga.enabled = true)".into()));
    }
    if let Some((_, Some(sel))) = global_state(cfg, raw)? {
        return sel;
    }
    let (train_idx, _) = holdout_indices(cfg, raw)?;
    let part = partition(cfg, raw, &train_idx, &[], None)?;
    select(cfg, &part.train, 0)
}

/// Trains the ST-GA stack on the holdout training split.
pub fn train_st_ga<F: Float>(cfg: &ExperimentConfig, raw: &Dataset<F>) -> Result<(StGaArtifact<F>, Option<Selection>)> {
    let (train_idx, _) = holdout_indices(cfg, raw)?;
    let global = global_state(cfg, raw)?;
    let part = partition(cfg, raw, &train_idx, &[], global.as_ref().map(|g| &g.0))?;
    let selection = match &global {
        Some((_, sel)) => clone_selection(sel).transpose()?,
        None if cfg.ga.enabled => Some(select(cfg, &part.train, 0)?),
        None => None,
    };
    let mask = selection.as_ref().map_or_else(|| (0..raw.n_features()).collect(), |s| s.mask.clone());
    let stack = stacking::train_stack(&cfg.stack_spec(), &part.train.select_features(&mask))?;
    let artifact = StGaArtifact {
        config_hash: cfg.hash()?,
        feature_names: raw.schema().feature_names(),
        preprocessor: part.preprocessor,
        mask,
        stack,
    };
    Ok((artifact, selection))
}

fn holdout_indices<F: Float>(cfg: &ExperimentConfig, raw: &Dataset<F>) -> Result<(Vec<usize>, Vec<usize>)> {
    split_indices(raw.n_samples(), cfg.split.holdout_fraction, rng::derive_seed(cfg.master_seed, stream::SPLIT))
}

/// Holdout report plus the by-products the CLI writes out.
#[derive(Debug, Clone)]
pub struct HoldoutOutcome<F: Float> {
    pub report: Report,
    /// ROC curve per model, in report order; `None` when undefined or failed.
    pub rocs: Vec<(String, Option<RocCurve>)>,
    pub provenance: Provenance,
    pub artifact: Option<StGaArtifact<F>>,
    pub selection: Option<Selection>,
}

fn timed<T>(include: bool, f: impl FnOnce() -> T) -> (T, Option<f64>) {
    let t = Instant::now();
    let out = f();
    (out, include.then(|| t.elapsed().as_secs_f64()))
}

/// Trains every learner and the ST-GA stack on the training split and scores
/// them on the held-out rows. A pre-trained `artifact` replaces the stack fit.
pub fn run_holdout<F: Float>(
    cfg: &ExperimentConfig,
    raw: &Dataset<F>,
    artifact: Option<StGaArtifact<F>>,
) -> Result<HoldoutOutcome<F>> {
    cfg.validate()?;
    let names = raw.schema().feature_names();
    if let Some(a) = &artifact {
        if a.feature_names != names {
            return Err(Error::Config(format!(
                "model was trained on predictors {:?}, but the data has {:?}",
                a.feature_names, names
            )));
        }
    }
    let (train_idx, test_idx) = holdout_indices(cfg, raw)?;
    log::info!("holdout: {} training rows, {} test rows", train_idx.len(), test_idx.len());
    let global = global_state(cfg, raw)?;
    let part = partition(cfg, raw, &train_idx, &test_idx, global.as_ref().map(|g| &g.0))?;
    let mut report = base_report(cfg, raw, Protocol::Holdout)?;
    let include_timing = cfg.report.include_timing;

    let selection: Option<Result<Selection>> = match &global {
        Some((_, sel)) => clone_selection(sel),
        None if cfg.ga.enabled => Some(select(cfg, &part.train, 0)),
        None => None,
    };
    let provenance = Provenance {
        scope: "holdout".into(),
        test_rows: part.test.row_ids().to_vec(),
        preprocess_rows: part.preprocess_rows.clone(),
        ga_rows: selection.as_ref().and_then(|s| s.as_ref().ok()).map(|s| s.rows.clone()).unwrap_or_default(),
        model_rows: part.train.row_ids().to_vec(),
    };
    let learner_mask: Vec<usize> = match &selection {
        Some(Ok(s)) if cfg.ga.apply_to_learners => s.mask.clone(),
        _ => (0..raw.n_features()).collect(),
    };

    let mut rocs = Vec::new();
    let train_l = part.train.select_features(&learner_mask);
    let test_l = part.test.select_features(&learner_mask);
    for (name, spec) in cfg.learner_specs() {
        let (res, secs) = timed(include_timing, || -> Result<_> {
            let model = learners::train(&spec, &train_l)?;
            let pred = model.predict(test_l.features())?;
            let scores = to_f64(model.positive_proba(test_l.features())?);
            evaluate_scores(&name, spec.algorithm.name(), learner_mask.len(), test_l.labels(), &pred, &scores)
        });
        let (mut row, roc) = res.unwrap_or_else(|e| {
            log::warn!("{name} failed: {e}");
            (ModelResult::failed(&name, spec.algorithm.name(), learner_mask.len(), e.to_string()), None)
        });
        row.seconds = secs;
        log::info!("{name}: accuracy {}", row.accuracy);
        report.holdout.push(row);
        rocs.push((name, roc));
    }

    let mut trained = None;
    if cfg.stack.enabled {
        let name = cfg.stack.name.clone();
        let (res, secs) = timed(include_timing, || -> Result<_> {
            let art = match artifact {
                Some(a) => a,
                None => {
                    let mask = match &selection {
                        Some(Ok(s)) => s.mask.clone(),
                        Some(Err(e)) => return Err(Error::Model(format!("feature selection failed: {e}"))),
                        None => (0..raw.n_features()).collect(),
                    };
                    let stack = stacking::train_stack(&cfg.stack_spec(), &part.train.select_features(&mask))?;
                    StGaArtifact {
                        config_hash: cfg.hash()?,
                        feature_names: names.clone(),
                        preprocessor: part.preprocessor.clone(),
                        mask,
                        stack,
                    }
                }
            };
            let test_raw = raw.subset(&test_idx);
            let pred = art.predict(&test_raw)?;
            let scores = to_f64(art.positive_proba(&test_raw)?);
            let algo = format!("stack/{}", art.stack.meta_model.spec().algorithm);
            let (row, roc) = evaluate_scores(&name, &algo, art.mask.len(), test_raw.labels(), &pred, &scores)?;
            Ok((row, roc, art))
        });
        match res {
            Ok((mut row, roc, art)) => {
                row.seconds = secs;
                log::info!("{name}: accuracy {}", row.accuracy);
                report.holdout.push(row);
                rocs.push((name, roc));
                trained = Some(art);
            }
            Err(e) => {
                log::warn!("{name} failed: {e}");
                report.holdout.push(ModelResult::failed(&name, "stack", 0, e.to_string()));
                rocs.push((name, None));
            }
        }
    }
    if let (Some(art), Some(Ok(sel))) = (&trained, &selection) {
        if art.mask != sel.mask {
            log::warn!("the loaded model's mask {:?} differs from this config's GA mask {:?}", art.mask, sel.mask);
        }
    }

    if let Some(sel) = &selection {
        let scope = if cfg.paper_faithful { "global" } else { "holdout" };
        let features = match (sel, cfg.report.feature_table) {
            (Ok(s), true) => {
                let ds = if cfg.paper_faithful {
                    global.as_ref().expect("global state").0.transform(raw).0
                } else {
                    part.train.clone()
                };
                feature_report(&ds, &cfg.ga.wrapper, cfg.ga.cv_k, rng::derive_seed(cfg.ga_config(0).seed, 1), &s.run)?
            }
            _ => Vec::new(),
        };
        report.feature_selection = Some(FeatureSelection {
            wrapper: cfg.ga.wrapper.algorithm,
            cv_k: cfg.ga.cv_k,
            masks: vec![mask_record(scope.into(), &names, sel)],
            features,
            reference: ReferencePoint::default(),
        });
    }
    Ok(HoldoutOutcome { report, rocs, provenance, artifact: trained, selection: selection.and_then(Result::ok) })
}

/// K-fold report plus per-fold provenance.
#[derive(Debug, Clone)]
pub struct KfoldOutcome {
    pub report: Report,
    pub provenance: Vec<Provenance>,
}

fn fold_seed(master: u64, k: usize) -> u64 {
    rng::derive_seed(rng::derive_seed(master, stream::FOLDS), k as u64)
}

/// Mean accuracy over `k` folds for every learner and the stack, for each
/// configured `k`. The GA reruns on each fold's training part.
pub fn run_kfold<F: Float>(cfg: &ExperimentConfig, raw: &Dataset<F>) -> Result<KfoldOutcome> {
    cfg.validate()?;
    if cfg.split.kfold.is_empty() {
        return Err(Error::Config("split.kfold lists no k".into()));
    }
    let mut report = base_report(cfg, raw, Protocol::Kfold)?;
    let names = raw.schema().feature_names();
    let global = global_state(cfg, raw)?;
    let learners = cfg.learner_specs();
    let mut masks = Vec::new();
    let mut provenance = Vec::new();
    if let Some((_, Some(sel))) = &global {
        masks.push(mask_record("global".into(), &names, sel));
    }
    for &k in &cfg.split.kfold {
        let plan = fold_plan_for_labels(raw.labels(), k, cfg.split.stratified, fold_seed(cfg.master_seed, k))?;
        let n_models = learners.len() + usize::from(cfg.stack.enabled);
        let mut accs: Vec<Vec<Metric>> = vec![Vec::with_capacity(k); n_models];
        let mut errors: Vec<Option<String>> = vec![None; n_models];
        let mut seconds = vec![0.0; n_models];
        for fold in 0..k {
            log::info!("k = {k}, fold {}/{k}", fold + 1);
            let test_idx = plan.test_indices(fold);
            let part = partition(cfg, raw, &plan.train_indices(fold), &test_idx, global.as_ref().map(|g| &g.0))?;
            let selection: Option<Result<Selection>> = match &global {
                Some((_, sel)) => clone_selection(sel),
                None if cfg.ga.enabled => {
                    let sel = select(cfg, &part.train, (k as u64) << 32 | fold as u64);
                    masks.push(mask_record(format!("k={k} fold={fold}"), &names, &sel));
                    Some(sel)
                }
                None => None,
            };
            provenance.push(Provenance {
                scope: format!("k={k} fold={fold}"),
                test_rows: part.test.row_ids().to_vec(),
                preprocess_rows: part.preprocess_rows.clone(),
                ga_rows: selection.as_ref().and_then(|s| s.as_ref().ok()).map(|s| s.rows.clone()).unwrap_or_default(),
                model_rows: part.train.row_ids().to_vec(),
            });
            let full: Vec<usize> = (0..raw.n_features()).collect();
            let learner_mask = match &selection {
                Some(Ok(s)) if cfg.ga.apply_to_learners => s.mask.clone(),
                _ => full.clone(),
            };
            let train_l = part.train.select_features(&learner_mask);
            let test_l = part.test.select_features(&learner_mask);
            for (m, (_, spec)) in learners.iter().enumerate() {
                let t = Instant::now();
                let res =
                    learners::train(spec, &train_l).and_then(|model: TrainedModel<F>| model.predict(test_l.features()));
                seconds[m] += t.elapsed().as_secs_f64();
                record_fold(&mut accs[m], &mut errors[m], res, test_l.labels(), fold)?;
            }
            if cfg.stack.enabled {
                let m = learners.len();
                let t = Instant::now();
                let res = match &selection {
                    Some(Err(e)) => Err(Error::Model(format!("feature selection failed: {e}"))),
                    sel => {
                        let mask = match sel {
                            Some(Ok(s)) => s.mask.clone(),
                            _ => full.clone(),
                        };
                        stacking::train_stack(&cfg.stack_spec(), &part.train.select_features(&mask))
                            .and_then(|s| s.predict(part.test.select_features(&mask).features()))
                    }
                };
                seconds[m] += t.elapsed().as_secs_f64();
                record_fold(&mut accs[m], &mut errors[m], res, part.test.labels(), fold)?;
            }
        }
        let model_names = learners.iter().map(|(n, s)| (n.clone(), s.algorithm.name().to_string())).chain(
            cfg.stack
                .enabled
                .then(|| (cfg.stack.name.clone(), format!("stack/{}", cfg.stack_spec().meta_spec.algorithm))),
        );
        for (m, (name, algorithm)) in model_names.enumerate() {
            let vals: Vec<f64> = accs[m].iter().filter_map(|a| a.value()).collect();
            let (mean, std) = if errors[m].is_none() && vals.len() == k {
                let mean = vals.iter().sum::<f64>() / k as f64;
                let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / k as f64;
                (Metric::Value(mean), Metric::Value(var.sqrt()))
            } else {
                (Metric::Undefined, Metric::Undefined)
            };
            log::info!("k = {k}: {name} mean accuracy {mean}");
            report.kfold.push(KfoldRow {
                name,
                algorithm,
                k,
                mean_accuracy: mean,
                std,
                fold_accuracies: accs[m].clone(),
                error: errors[m].clone(),
                seconds: include_seconds(cfg, seconds[m]),
            });
        }
    }
    if cfg.ga.enabled {
        report.feature_selection = Some(FeatureSelection {
            wrapper: cfg.ga.wrapper.algorithm,
            cv_k: cfg.ga.cv_k,
            masks,
            features: Vec::new(),
            reference: ReferencePoint::default(),
        });
    }
    Ok(KfoldOutcome { report, provenance })
}

fn include_seconds(cfg: &ExperimentConfig, s: f64) -> Option<f64> {
    cfg.report.include_timing.then_some(s)
}

fn record_fold(
    acc: &mut Vec<Metric>,
    err: &mut Option<String>,
    res: Result<Vec<u8>>,
    y: &[u8],
    fold: usize,
) -> Result<()> {
    match res {
        Ok(pred) => acc.push(metrics::accuracy(&metrics::confusion(y, &pred)?)),
        Err(e) => {
            acc.push(Metric::Undefined);
            err.get_or_insert_with(|| format!("fold {fold}: {e}"));
        }
    }
    Ok(())
}
