//! Acceptance criteria 1-10. Each test prints one `PASS`/`FAIL` line to
//! stderr (bypassing the test harness's capture) and then asserts.

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::Rng as _;
use tempfile::TempDir;

use stga_core::dataset::{load_csv, Dataset, Schema};
use stga_core::genetic::{
    crossover_with_cuts, mutate_bit_inversion, rank_scale, roulette_select, run_ga, Chromosome, GaConfig,
};
use stga_core::learners::mlp::{loss_and_gradient, MlpModel};
use stga_core::learners::{train, Algorithm, LearnerSpec};
use stga_core::matrix::Matrix;
use stga_core::metrics::{self, Metric};
use stga_core::pipeline::config::STACK_ROW_NAME;
use stga_core::pipeline::{self, ExperimentConfig, Report};
use stga_core::rng::rng_from_seed;
use stga_core::stacking::{build_level1_traced, Level1Feature, Level1Mode, StackSpec};
use stga_core::synthetic;

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

/// Collects sub-checks, prints the verdict line, then fails the test if any check failed.
struct Criterion {
    id: u8,
    title: &'static str,
    budget: Duration,
    start: Instant,
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Criterion {
    fn new(id: u8, title: &'static str, budget_secs: u64) -> Self {
        Self {
            id,
            title,
            budget: Duration::from_secs(budget_secs),
            start: Instant::now(),
            failures: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, what: impl Into<String>) {
        let what = what.into();
        if ok {
            self.notes.push(what);
        } else {
            self.failures.push(what);
        }
    }

    fn finish(mut self) {
        let elapsed = self.start.elapsed();
        self.check(
            elapsed < self.budget,
            format!("runtime {:.1}s < {}s", elapsed.as_secs_f64(), self.budget.as_secs()),
        );
        let verdict = if self.failures.is_empty() { "PASS" } else { "FAIL" };
        let mut line = format!("criterion {:>2} [{verdict}] {} ({:.1}s)", self.id, self.title, elapsed.as_secs_f64());
        if !self.failures.is_empty() {
            line.push_str(&format!("; failed: {}", self.failures.join("; ")));
        }
        let _ = writeln!(std::io::stderr(), "{line}");
        for n in &self.notes {
            let _ = writeln!(std::io::stderr(), "    ok: {n}");
        }
        assert!(self.failures.is_empty(), "criterion {} failed: {}", self.id, self.failures.join("; "));
    }
}

fn metric(m: Metric) -> f64 {
    m.value().unwrap_or(f64::NAN)
}

fn same(a: f64, b: f64, tol: f64) -> bool {
    (a.is_nan() && b.is_nan()) || (a - b).abs() < tol
}

#[test]
fn criterion_01_metric_oracle() {
    let mut c = Criterion::new(1, "metric oracle equivalence", 1);
    let mut rng = rng_from_seed(101);
    let mut worst = 0.0f64;
    let mut mismatches = 0;
    for _ in 0..1000 {
        let n = rng.random_range(1..=60);
        let y: Vec<u8> = (0..n).map(|_| rng.random_range(0..=1)).collect();
        let p: Vec<u8> = (0..n).map(|_| rng.random_range(0..=1)).collect();
        // Brute-force tally straight from the definitions.
        let (mut tp, mut tn, mut fp, mut fnn) = (0.0, 0.0, 0.0, 0.0);
        for i in 0..n {
            match (y[i], p[i]) {
                (1, 1) => tp += 1.0,
                (0, 0) => tn += 1.0,
                (0, 1) => fp += 1.0,
                _ => fnn += 1.0,
            }
        }
        let div = |a: f64, b: f64| if b == 0.0 { f64::NAN } else { a / b };
        let sn = div(tp, tp + fnn);
        let sp = div(tn, tn + fp);
        let expect = [div(tp + tn, n as f64), sn, sp, if sn + sp > 0.0 { 2.0 * sp * sn / (sp + sn) } else { f64::NAN }];
        let cm = metrics::confusion(&y, &p).unwrap();
        let got = [metrics::accuracy(&cm), metrics::sensitivity(&cm), metrics::specificity(&cm), metrics::fscore(&cm)]
            .map(metric);
        for (g, e) in got.iter().zip(expect) {
            if !same(*g, e, 1e-12) {
                mismatches += 1;
            } else if !e.is_nan() {
                worst = worst.max((g - e).abs());
            }
        }
    }
    c.check(mismatches == 0, format!("1000 pairs, {mismatches} mismatches, max |diff| {worst:e} < 1e-12"));
    c.finish();
}

fn pair_auc(y: &[u8], s: &[f64]) -> f64 {
    let (mut good, mut pairs) = (0.0, 0.0);
    for i in 0..y.len() {
        for j in 0..y.len() {
            if y[i] == 1 && y[j] == 0 {
                pairs += 1.0;
                if s[i] > s[j] {
                    good += 1.0;
                } else if s[i] == s[j] {
                    good += 0.5;
                }
            }
        }
    }
    good / pairs
}

#[test]
fn criterion_02_auc_oracle() {
    let mut c = Criterion::new(2, "AUC oracle", 5);
    let mut rng = rng_from_seed(202);
    let mut worst = 0.0f64;
    for set in 0..500 {
        let n = rng.random_range(2..=200);
        let mut y: Vec<u8> = (0..n).map(|_| rng.random_range(0..=1)).collect();
        y[0] = 1;
        y[1] = 0;
        // Coarse scores on half the sets so ties are common.
        let levels = if set % 2 == 0 { 7 } else { 1_000_000 };
        let s: Vec<f64> = (0..n).map(|_| rng.random_range(0..levels) as f64 / levels as f64).collect();
        let a = metrics::auc(&metrics::roc_curve(&y, &s).unwrap());
        worst = worst.max((a - pair_auc(&y, &s)).abs());
    }
    c.check(worst < 1e-12, format!("500 score sets, max |trapezoid - pair count| = {worst:e} < 1e-12"));
    c.finish();
}

#[test]
fn criterion_03_ga_operators() {
    let mut c = Criterion::new(3, "GA operator suite", 10);

    let a = Chromosome::parse("101100").unwrap();
    let b = Chromosome::parse("010111").unwrap();
    let mut bad_pairs = 0;
    let mut pairs = 0;
    for p in 0..=6 {
        for q in p + 1..=6 {
            pairs += 1;
            let (x, y) = crossover_with_cuts(&a, &b, p, q);
            let ok = (0..6).all(|i| {
                let inside = p <= i && i < q;
                x.bits[i] == if inside { b.bits[i] } else { a.bits[i] }
                    && y.bits[i] == if inside { a.bits[i] } else { b.bits[i] }
            });
            bad_pairs += usize::from(!ok);
        }
    }
    c.check(bad_pairs == 0, format!("double-point crossover correct for all {pairs} cut pairs at length 6"));

    let mut rng = rng_from_seed(303);
    let zeros = Chromosome::new(vec![false; 1000]);
    let sigma = (1000.0f64 * 0.1 * 0.9).sqrt();
    let outside = (0..1000)
        .filter(|_| ((mutate_bit_inversion(&zeros, 0.1, &mut rng).count_ones() as f64) - 100.0).abs() > 5.0 * sigma)
        .count();
    c.check(
        outside == 0,
        format!("mutation flip counts within 5 sigma of Binomial(1000, 0.1) in 1000 trials ({outside} outside)"),
    );

    let weights = [1.0, 3.0, 0.0, 4.0];
    let draws = roulette_select(&weights, 100_000, &mut rng).unwrap();
    let max_dev = (0..4)
        .map(|i| (draws.iter().filter(|&&d| d == i).count() as f64 / 1e5 - weights[i] / 8.0).abs())
        .fold(0.0, f64::max);
    c.check(max_dev < 0.01, format!("roulette frequencies within 1% at 1e5 draws (max deviation {max_dev:.4})"));

    let mut worst = 0.0f64;
    for n in [2usize, 3, 10] {
        for sp in [1.0, 1.5, 2.0] {
            let fit: Vec<f64> = (0..n).map(|i| ((i * 7 + 3) % n) as f64).collect();
            let w = rank_scale(&fit, sp);
            for i in 0..n {
                let pos = fit[i];
                let expect = 2.0 - sp + 2.0 * (sp - 1.0) * pos / (n - 1) as f64;
                worst = worst.max((w[i] - expect).abs());
            }
        }
    }
    c.check(worst < 1e-12, format!("rank_scale matches linear ranking for N in {{2,3,10}} (max error {worst:e})"));
    c.finish();
}

#[test]
fn criterion_04_ga_onemax() {
    let mut c = Criterion::new(4, "GA OneMax oracle", 60);
    let onemax = |ch: &Chromosome| ch.count_ones() as f64 / ch.len() as f64;
    let (mut hits, mut non_monotone) = (0, 0);
    for seed in 0..100 {
        let cfg = GaConfig {
            nind: 20,
            subpop: 5,
            maxgen: 100,
            migr: 0.2,
            insr: 0.95,
            miggen: 20,
            seed,
            ..GaConfig::default()
        };
        let run = run_ga(&cfg, 30, &onemax).unwrap();
        hits += usize::from(run.best_fitness == 1.0);
        non_monotone += usize::from(run.best_per_generation().windows(2).any(|w| w[1] < w[0]));
    }
    c.check(hits >= 95, format!("optimum reached in {hits}/100 runs (need >= 95)"));
    c.check(non_monotone == 0, format!("best-fitness history monotone in every run ({non_monotone} violations)"));
    c.finish();
}

#[test]
fn criterion_05_learner_sanity() {
    let mut c = Criterion::new(5, "learner sanity on separable clouds", 120);
    let train_ds = synthetic::gaussian_clouds::<f64>(500, 2, 3.0, 0.5, 51);
    let test_ds = synthetic::gaussian_clouds::<f64>(500, 2, 3.0, 0.5, 52);
    for alg in [
        Algorithm::RandomForest,
        Algorithm::Knn,
        Algorithm::Mlp,
        Algorithm::Adaboost,
        Algorithm::DecisionTree,
        Algorithm::GaussianNb,
        Algorithm::GradientBoosting,
        Algorithm::Svm,
        Algorithm::ExtraTrees,
        Algorithm::LogisticRegression,
    ] {
        let model = train(&LearnerSpec::new(alg).with_seed(5), &train_ds).unwrap();
        let pred = model.predict(test_ds.features()).unwrap();
        let acc = metric(metrics::accuracy(&metrics::confusion(test_ds.labels(), &pred).unwrap()));
        c.check(acc >= 0.95, format!("{alg}: test accuracy {acc:.3} >= 0.95"));
    }
    c.finish();
}

#[test]
fn criterion_06_mlp_gradient() {
    let mut c = Criterion::new(6, "MLP gradient check", 1);
    let x = Matrix::from_rows(&[
        vec![0.3, -0.8, 1.2],
        vec![-1.4, 0.5, 0.1],
        vec![0.9, 1.1, -0.6],
        vec![-0.2, -1.3, 0.7],
        vec![1.6, 0.4, -1.0],
    ])
    .unwrap();
    let y = [0u8, 1, 1, 0, 1];
    let rows: Vec<usize> = (0..5).collect();
    let hidden = 6;
    let theta = MlpModel::<f64>::init(3, hidden, 61).params;
    let alpha = 1e-3;
    let (_, grad) = loss_and_gradient(3, hidden, &theta, &x, &y, &rows, alpha);
    let h = 1e-6;
    let mut worst = 0.0f64;
    for i in 0..theta.len() {
        let (mut plus, mut minus) = (theta.clone(), theta.clone());
        plus[i] += h;
        minus[i] -= h;
        let numeric = (loss_and_gradient(3, hidden, &plus, &x, &y, &rows, alpha).0
            - loss_and_gradient(3, hidden, &minus, &x, &y, &rows, alpha).0)
            / (2.0 * h);
        let scale = grad[i].abs().max(numeric.abs()).max(1e-8);
        worst = worst.max((grad[i] - numeric).abs() / scale);
    }
    c.check(worst < 1e-4, format!("{} parameters, max relative error {worst:e} < 1e-4", theta.len()));
    c.finish();
}

fn pima_raw() -> Dataset<f64> {
    load_csv(&root().join("data/pima-indians-diabetes.csv"), &Schema::pima(), true).unwrap()
}

#[test]
fn criterion_07_stacking_leakage() {
    let mut c = Criterion::new(7, "stacking shape and leakage properties", 60);
    let ds = pima_raw();
    let bases: Vec<LearnerSpec> = pipeline::config::default_learners().iter().map(|l| l.spec()).collect();
    let spec = StackSpec::new(bases);
    let (d, trace) = build_level1_traced(&spec, &ds).unwrap();
    c.check(
        (d.n_samples(), d.n_features()) == (768, 9),
        format!("D' is {}x{} (m x T = 768 x 9)", d.n_samples(), d.n_features()),
    );
    c.check(d.labels() == ds.labels(), "labels preserved");
    let leaks = trace.leaks(&ds).len();
    c.check(leaks == 0, format!("out-of-fold purity on instrumented Pima run ({leaks} leaking entries)"));

    let noise = synthetic::label_noise::<f64>(300, 3, 0.5, 71);
    let mut memo = StackSpec::new(vec![LearnerSpec::new(Algorithm::Knn).with("n_neighbors", 1)]);
    memo.level1_mode = Level1Mode::Naive;
    memo.level1_feature_kind = Level1Feature::Label;
    let (d, _) = build_level1_traced(&memo, &noise).unwrap();
    let col: Vec<u8> = d.features().column(0).iter().map(|&v| v as u8).collect();
    c.check(col == noise.labels(), "naive mode with a 1-NN base yields a D' column equal to y");
    c.finish();
}

fn stga(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_stga")).args(args).output().expect("binary runs")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn holdout_via_cli(out: &Path, extra: &[&str]) -> Report {
    let cfg = root().join("configs/pima.toml");
    for cmd in ["train", "eval"] {
        let mut args = vec!["--config", s(&cfg), "--out", s(out), "-q"];
        args.extend_from_slice(extra);
        args.push(cmd);
        let o = stga(&args);
        assert!(o.status.success(), "{cmd}: {}", String::from_utf8_lossy(&o.stderr));
    }
    Report::from_json(&std::fs::read_to_string(out.join("holdout_report.json")).unwrap()).unwrap()
}

fn accuracy_of(r: &Report, name: &str) -> f64 {
    metric(r.holdout.iter().find(|m| m.name == name).unwrap().accuracy)
}

#[test]
fn criterion_08_pima_holdout() {
    let mut c = Criterion::new(8, "end-to-end Pima holdout", 300);
    let dir = TempDir::new().unwrap();
    let report = holdout_via_cli(dir.path(), &[]);
    let stack = accuracy_of(&report, STACK_ROW_NAME);
    let (best_name, best) = report
        .holdout
        .iter()
        .filter(|m| m.name != STACK_ROW_NAME)
        .map(|m| (m.name.clone(), metric(m.accuracy)))
        .fold((String::new(), 0.0), |a, b| if b.1 > a.1 { b } else { a });
    let oof = matches!(report.settings.stack_mode, Level1Mode::OutOfFold { .. });
    c.check(oof && report.settings.ga_scope == "training_split", "out-of-fold stacking, GA inside the training split");
    c.check(report.holdout.len() == 10, format!("report has {} rows (expected 10)", report.holdout.len()));
    c.check(stack >= 0.75, format!("ST-GA accuracy {stack:.4} >= 0.75"));
    c.check(stack >= best - 0.02, format!("ST-GA accuracy {stack:.4} >= best single ({best_name} {best:.4}) - 0.02"));

    let pf_dir = TempDir::new().unwrap();
    let pf = holdout_via_cli(pf_dir.path(), &["--set", "paper_faithful=true"]);
    let pf_stack = accuracy_of(&pf, STACK_ROW_NAME);
    c.check(
        pf.settings.paper_faithful && pf.settings.stack_mode == Level1Mode::Naive,
        "paper-faithful run uses naive, global fitting",
    );
    c.check(pf_stack > 0.90, format!("paper-faithful ST-GA accuracy {pf_stack:.4} > 0.90"));
    c.finish();
}

#[test]
fn criterion_09_feature_selection() {
    let mut c = Criterion::new(9, "GA feature selection on Pima", 180);
    let cfg = ExperimentConfig::load(&root().join("configs/pima.toml")).unwrap();
    let raw: Dataset<f64> = pipeline::load_dataset(&cfg).unwrap();
    let out = pipeline::run_holdout(&cfg, &raw, None).unwrap();
    let fs = out.report.feature_selection.as_ref().expect("feature selection section");
    let mask = &fs.masks[0];
    c.check(mask.error.is_none(), "GA run completed");
    c.check(
        mask.n_selected <= 8 && mask.n_selected >= 1,
        format!("mask has {} features (<= 8): {}", mask.n_selected, mask.selected.join(", ")),
    );
    c.check(
        mask.cv_accuracy >= mask.full_mask_cv_accuracy - 0.01,
        format!("wrapper CV accuracy {:.4} >= all-feature {:.4} - 0.01", mask.cv_accuracy, mask.full_mask_cv_accuracy),
    );
    c.check(
        fs.reference.accuracy == 0.93 && fs.reference.n_features == 5,
        "report carries the 93% / 5-feature reference point",
    );
    let md = pipeline::render_report(&out.report, pipeline::ReportFormat::Markdown).unwrap();
    c.check(md.contains("93% accuracy with 5 features"), "markdown report cites the reference point");
    c.finish();
}

#[test]
fn criterion_10_xval_determinism() {
    let mut c = Criterion::new(10, "k-fold report determinism", 600);
    let cfg = root().join("configs/pima.toml");
    let dir = TempDir::new().unwrap();
    let mut bytes = Vec::new();
    for run in ["a", "b"] {
        let out = dir.path().join(run);
        let o = stga(&["--config", s(&cfg), "--out", s(&out), "-q", "xval"]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        bytes.push(std::fs::read(out.join("xval_report.json")).unwrap());
    }
    c.check(bytes[0] == bytes[1], format!("two xval runs give byte-identical JSON ({} bytes)", bytes[0].len()));
    let report = Report::from_json(std::str::from_utf8(&bytes[0]).unwrap()).unwrap();
    c.check(report.kfold_ks() == [5, 10, 15], format!("k values {:?}", report.kfold_ks()));
    let models = report.kfold_models();
    c.check(
        models.len() == 10 && models.last() == Some(&STACK_ROW_NAME),
        format!("{} model rows (expected 10)", models.len()),
    );
    c.finish();
}
