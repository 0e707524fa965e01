//! `stga`: prepare data, select features, train and evaluate ST-GA stacks.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgAction, Parser, Subcommand};
use serde::Serialize;

use stga_core::error::Error;
use stga_core::pipeline::{self, ExperimentConfig, Report, ReportFormat, StGaArtifact};
use stga_core::Dataset;

/// Exit status for each failure class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Exit {
    Model = 1,
    Config = 2,
    Io = 3,
}

#[derive(Debug)]
struct Failure {
    exit: Exit,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let exit = match &e {
            Error::Config(_) | Error::Hyperparameter { .. } | Error::ShapeMismatch { .. } => Exit::Config,
            Error::Io { .. } | Error::MalformedRow { .. } | Error::Data(_) | Error::Serde(_) => Exit::Io,
            Error::SingleClass(_) | Error::DegenerateFold { .. } | Error::Model(_) => Exit::Model,
        };
        Failure { exit, message: e.to_string() }
    }
}

type CliResult<T> = Result<T, Failure>;

fn config_error(message: impl Into<String>) -> Failure {
    Failure { exit: Exit::Config, message: message.into() }
}

fn io_error(path: &Path, e: std::io::Error) -> Failure {
    Failure { exit: Exit::Io, message: format!("{}: {e}", path.display()) }
}

#[derive(Debug, Parser)]
#[command(name = "stga", version, about = "GA feature selection and stacked generalization experiments")]
struct Cli {
    /// Experiment config (TOML).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Master seed; overrides `master_seed` in the config.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,

    /// Override a config key, e.g. `--set ga.params.maxgen=50`. Repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    overrides: Vec<String>,

    /// Output directory.
    #[arg(long, global = true, value_name = "DIR", default_value = "out")]
    out: PathBuf,

    /// More log output (-v info, -vv debug).
    #[arg(short, long, global = true, action = ArgAction::Count)]
    verbose: u8,

    /// Only print errors.
    #[arg(short, long, global = true, conflicts_with = "verbose")]
    quiet: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Impute zero sentinels and clip outliers; write the cleaned CSV and a summary.
    Prep,
    /// Run GA feature selection; write the best mask and the GA history.
    Select,
    /// Train the ST-GA stack on the holdout training split and save it.
    Train,
    /// Holdout evaluation of every learner and a trained stack, with ROC point files.
    Eval {
        /// Model written by `train` (default: `<out>/model.json`).
        #[arg(long, value_name = "PATH")]
        model: Option<PathBuf>,
    },
    /// K-fold cross-validation for every configured k.
    Xval,
    /// Re-render a JSON report in another format.
    Report {
        /// A JSON report written by `eval` or `xval`.
        #[arg(value_name = "REPORT")]
        input: PathBuf,
        /// json, csv or markdown.
        #[arg(long, default_value = "markdown")]
        format: ReportFormat,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match (cli.quiet, cli.verbose) {
        (true, _) => log::LevelFilter::Error,
        (false, 0) => log::LevelFilter::Warn,
        (false, 1) => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).format_timestamp(None).init();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.exit as u8)
        }
    }
}

fn run(cli: &Cli) -> CliResult<()> {
    if let Command::Report { input, format } = &cli.command {
        return cmd_report(cli, input, *format);
    }
    let cfg = load_config(cli)?;
    if !cli.quiet {
        println!("master seed: {}", cfg.master_seed);
        println!("config hash: {}", cfg.hash()?);
    }
    let raw: Dataset = pipeline::load_dataset(&cfg)?;
    fs::create_dir_all(&cli.out).map_err(|e| io_error(&cli.out, e))?;
    match &cli.command {
        Command::Prep => cmd_prep(cli, &cfg, &raw),
        Command::Select => cmd_select(cli, &cfg, &raw),
        Command::Train => cmd_train(cli, &cfg, &raw),
        Command::Eval { model } => cmd_eval(cli, &cfg, &raw, model.as_deref()),
        Command::Xval => cmd_xval(cli, &cfg, &raw),
        Command::Report { .. } => unreachable!("handled above"),
    }
}

fn load_config(cli: &Cli) -> CliResult<ExperimentConfig> {
    let path = cli.config.as_deref().ok_or_else(|| config_error("--config PATH is required for this command"))?;
    if !path.exists() {
        return Err(Failure { exit: Exit::Io, message: format!("config file {} does not exist", path.display()) });
    }
    let mut cfg = ExperimentConfig::load(path)?;
    for o in &cli.overrides {
        cfg.apply_override(o)?;
    }
    if let Some(seed) = cli.seed {
        cfg.master_seed = seed;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn write(cli: &Cli, path: &Path, text: &str) -> CliResult<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
    }
    fs::write(path, text).map_err(|e| io_error(path, e))?;
    if !cli.quiet {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn json<T: Serialize>(value: &T) -> CliResult<String> {
    Ok(serde_json::to_string_pretty(value).map_err(Error::from)? + "\n")
}

fn cmd_prep(cli: &Cli, cfg: &ExperimentConfig, raw: &Dataset) -> CliResult<()> {
    let (clean, summary) = pipeline::prepare_dataset(cfg, raw)?;
    let stem = cfg.data_path().file_stem().map_or_else(|| "data".to_string(), |s| s.to_string_lossy().into_owned());
    write(cli, &cli.out.join(format!("{stem}.clean.csv")), &clean.to_csv_string(cfg.dataset.has_header))?;
    write(cli, &cli.out.join("prep_summary.json"), &json(&summary)?)?;
    if !cli.quiet {
        println!(
            "{} rows, {} values imputed, {} values clipped",
            summary.rows, summary.imputed_total, summary.clipped_total
        );
    }
    Ok(())
}

#[derive(Serialize)]
struct MaskFile<'a> {
    config_hash: String,
    master_seed: u64,
    scope: &'a str,
    selected: Vec<&'a str>,
    indices: &'a [usize],
    n_selected: usize,
    cv_accuracy: f64,
    full_mask_cv_accuracy: f64,
    generations: usize,
    evaluations: usize,
    stopped_early: bool,
}

fn write_selection(cli: &Cli, cfg: &ExperimentConfig, raw: &Dataset, sel: &pipeline::Selection) -> CliResult<()> {
    let names = raw.schema().feature_names();
    let file = MaskFile {
        config_hash: cfg.hash()?,
        master_seed: cfg.master_seed,
        scope: if cfg.paper_faithful { "whole_dataset" } else { "training_split" },
        selected: sel.mask.iter().map(|&i| names[i].as_str()).collect(),
        indices: &sel.mask,
        n_selected: sel.mask.len(),
        cv_accuracy: sel.run.best_fitness,
        full_mask_cv_accuracy: sel.full_mask_cv_accuracy,
        generations: sel.run.generations,
        evaluations: sel.run.evaluations,
        stopped_early: sel.run.stopped_early,
    };
    write(cli, &cli.out.join("mask.json"), &json(&file)?)?;
    write(cli, &cli.out.join("ga_history.csv"), &sel.run.history_csv())?;
    if !cli.quiet {
        println!(
            "selected {} of {} features: {} (cv accuracy {:.4}, all features {:.4})",
            file.n_selected,
            names.len(),
            file.selected.join(", "),
            file.cv_accuracy,
            file.full_mask_cv_accuracy
        );
    }
    Ok(())
}

fn cmd_select(cli: &Cli, cfg: &ExperimentConfig, raw: &Dataset) -> CliResult<()> {
    let sel = pipeline::holdout_selection(cfg, raw)?;
    write_selection(cli, cfg, raw, &sel)
}

fn cmd_train(cli: &Cli, cfg: &ExperimentConfig, raw: &Dataset) -> CliResult<()> {
    let (artifact, sel) = pipeline::train_st_ga(cfg, raw)?;
    if let Some(sel) = &sel {
        write_selection(cli, cfg, raw, sel)?;
    }
    write(cli, &cli.out.join("model.json"), &artifact.to_json()?)
}

fn slug(name: &str) -> String {
    let mut out = String::new();
    for c in name.chars() {
        if c.is_ascii_alphanumeric() {
            out.push(c.to_ascii_lowercase());
        } else if !out.ends_with('-') {
            out.push('-');
        }
    }
    out.trim_matches('-').to_string()
}

fn write_reports(cli: &Cli, cfg: &ExperimentConfig, report: &Report, stem: &str) -> CliResult<()> {
    for &format in &cfg.report.formats {
        let text = pipeline::render_report(report, format)?;
        write(cli, &cli.out.join(format!("{stem}.{}", format.extension())), &text)?;
    }
    if !cli.quiet {
        println!("\n{}", pipeline::render_report(report, ReportFormat::Markdown)?);
    }
    Ok(())
}

fn failed_models(names: impl Iterator<Item = (String, bool)>) -> CliResult<()> {
    let failed: Vec<String> = names.filter(|(_, f)| *f).map(|(n, _)| n).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure { exit: Exit::Model, message: format!("model(s) failed: {}", failed.join(", ")) })
    }
}

fn cmd_eval(cli: &Cli, cfg: &ExperimentConfig, raw: &Dataset, model: Option<&Path>) -> CliResult<()> {
    let artifact = if cfg.stack.enabled {
        let path = model.map_or_else(|| cli.out.join("model.json"), Path::to_path_buf);
        if !path.exists() {
            return Err(Failure {
                exit: Exit::Io,
                message: format!("model file {} does not exist (run `stga train` first)", path.display()),
            });
        }
        let a = StGaArtifact::<f64>::load(&path)?;
        if a.config_hash != cfg.hash()? {
            log::warn!("{} was trained under a different config", path.display());
        }
        Some(a)
    } else {
        None
    };
    let outcome = pipeline::run_holdout(cfg, raw, artifact)?;
    for (name, roc) in &outcome.rocs {
        match roc {
            Some(curve) => write(cli, &cli.out.join("roc").join(format!("{}.csv", slug(name))), &curve.to_csv())?,
            None => log::warn!("{name}: no ROC curve"),
        }
    }
    write_reports(cli, cfg, &outcome.report, "holdout_report")?;
    failed_models(outcome.report.holdout.iter().map(|r| (r.name.clone(), r.error.is_some())))
}

fn cmd_xval(cli: &Cli, cfg: &ExperimentConfig, raw: &Dataset) -> CliResult<()> {
    let outcome = pipeline::run_kfold(cfg, raw)?;
    write_reports(cli, cfg, &outcome.report, "xval_report")?;
    failed_models(outcome.report.kfold.iter().map(|r| (format!("{} (k={})", r.name, r.k), r.error.is_some())))
}

fn cmd_report(cli: &Cli, input: &Path, format: ReportFormat) -> CliResult<()> {
    let text = fs::read_to_string(input).map_err(|e| io_error(input, e))?;
    let report = Report::from_json(&text)?;
    let stem = input.file_stem().map_or_else(|| "report".to_string(), |s| s.to_string_lossy().into_owned());
    fs::create_dir_all(&cli.out).map_err(|e| io_error(&cli.out, e))?;
    write(cli, &cli.out.join(format!("{stem}.{}", format.extension())), &pipeline::render_report(&report, format)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slugs_are_file_safe() {
        assert_eq!(slug("Suggest Method (ST-GA)"), "suggest-method-st-ga");
        assert_eq!(slug("D tree Classifier"), "d-tree-classifier");
    }

    #[test]
    fn error_classes_map_to_exit_codes() {
        assert_eq!(Failure::from(Error::Config("x".into())).exit, Exit::Config);
        assert_eq!(Failure::from(Error::Data("x".into())).exit, Exit::Io);
        assert_eq!(Failure::from(Error::Model("x".into())).exit, Exit::Model);
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
