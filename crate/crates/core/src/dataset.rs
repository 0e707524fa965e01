//! Tabular binary-classification data: schema, CSV ingestion, cleaning
//! (median imputation of zero sentinels, IQR outlier replacement,
//! standardization) and seeded partitioning into holdout splits and folds.
//!
//! Cleaning steps are split into a `fit` on one dataset and a `transform` of
//! another so statistics can be learned on a training partition only.

use std::collections::BTreeSet;
use std::io::Read;
use std::path::Path;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::num::{self, Float};
use crate::rng;

/// Column layout of a CSV file. Indices refer to file columns, label included.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schema {
    column_names: Vec<String>,
    label_column: usize,
    missing_as_zero_columns: BTreeSet<usize>,
}

impl Schema {
    pub fn new(
        column_names: Vec<String>,
        label_column: usize,
        missing_as_zero_columns: BTreeSet<usize>,
    ) -> Result<Self> {
        if label_column >= column_names.len() {
            return Err(Error::Config(format!(
                "label column {label_column} out of range for {} columns",
                column_names.len()
            )));
        }
        if missing_as_zero_columns.contains(&label_column) {
            return Err(Error::Config("the label column cannot be a missing-as-zero column".into()));
        }
        if let Some(&c) = missing_as_zero_columns.iter().find(|&&c| c >= column_names.len()) {
            return Err(Error::Config(format!("missing-as-zero column {c} out of range")));
        }
        let unique: BTreeSet<&String> = column_names.iter().collect();
        if unique.len() != column_names.len() {
            return Err(Error::Config("column names must be unique".into()));
        }
        Ok(Self { column_names, label_column, missing_as_zero_columns })
    }

    /// Builds a schema from names, resolving the label and sentinel columns by name.
    pub fn from_names(column_names: Vec<String>, label: &str, missing_as_zero: &[String]) -> Result<Self> {
        let find = |name: &str| {
            column_names.iter().position(|c| c == name).ok_or_else(|| Error::Config(format!("unknown column {name:?}")))
        };
        let label_column = find(label)?;
        let missing = missing_as_zero.iter().map(|n| find(n)).collect::<Result<BTreeSet<_>>>()?;
        Self::new(column_names, label_column, missing)
    }

    /// The Pima Indians diabetes layout: eight predictors then `Outcome`.
    /// Glucose, blood pressure, skinfold thickness, insulin and BMI use 0 for
    /// a missing measurement.
    pub fn pima() -> Self {
        let names = [
            "Pregnancies",
            "Glucose",
            "BloodPressure",
            "SkinThickness",
            "Insulin",
            "BMI",
            "DiabetesPedigreeFunction",
            "Age",
            "Outcome",
        ];
        Self::new(names.iter().map(|s| s.to_string()).collect(), 8, [1, 2, 3, 4, 5].into_iter().collect())
            .expect("static schema is valid")
    }

    /// `x0..x{n-1}` predictors followed by a `y` label, no sentinel columns.
    pub fn anonymous(n_features: usize) -> Self {
        let mut names: Vec<String> = (0..n_features).map(|i| format!("x{i}")).collect();
        names.push("y".into());
        Self::new(names, n_features, BTreeSet::new()).expect("generated schema is valid")
    }

    pub fn column_names(&self) -> &[String] {
        &self.column_names
    }

    pub fn label_column(&self) -> usize {
        self.label_column
    }

    pub fn label_name(&self) -> &str {
        &self.column_names[self.label_column]
    }

    pub fn missing_as_zero_columns(&self) -> &BTreeSet<usize> {
        &self.missing_as_zero_columns
    }

    pub fn n_columns(&self) -> usize {
        self.column_names.len()
    }

    pub fn n_features(&self) -> usize {
        self.column_names.len() - 1
    }

    /// Predictor names in feature-matrix order.
    pub fn feature_names(&self) -> Vec<String> {
        self.column_names.iter().enumerate().filter(|&(i, _)| i != self.label_column).map(|(_, n)| n.clone()).collect()
    }

    /// Maps a file column index to its feature-matrix index.
    pub fn feature_index(&self, column: usize) -> Option<usize> {
        match column.cmp(&self.label_column) {
            std::cmp::Ordering::Less => Some(column),
            std::cmp::Ordering::Equal => None,
            std::cmp::Ordering::Greater => Some(column - 1),
        }
    }

    /// Feature indices whose zeros denote missing values.
    pub fn missing_feature_indices(&self) -> Vec<usize> {
        self.missing_as_zero_columns.iter().filter_map(|&c| self.feature_index(c)).collect()
    }

    /// Schema of the dataset restricted to the given feature indices; the label
    /// moves to the last column.
    pub fn select_features(&self, features: &[usize]) -> Schema {
        let names = self.feature_names();
        let missing: BTreeSet<usize> = self.missing_feature_indices().into_iter().collect();
        let mut cols: Vec<String> = features.iter().map(|&f| names[f].clone()).collect();
        let sentinel = features.iter().enumerate().filter(|(_, f)| missing.contains(f)).map(|(i, _)| i).collect();
        cols.push(self.label_name().to_string());
        let label = cols.len() - 1;
        Schema::new(cols, label, sentinel).expect("subset of a valid schema is valid")
    }
}

/// Feature matrix, binary labels and schema. `row_ids` records each row's
/// index in the originally loaded data so partitions can be traced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Dataset<F: Float> {
    features: Matrix<F>,
    labels: Vec<u8>,
    schema: Schema,
    row_ids: Vec<usize>,
}

impl<F: Float> Dataset<F> {
    pub fn new(features: Matrix<F>, labels: Vec<u8>, schema: Schema) -> Result<Self> {
        let row_ids = (0..labels.len()).collect();
        Self::with_row_ids(features, labels, schema, row_ids)
    }

    pub fn with_row_ids(features: Matrix<F>, labels: Vec<u8>, schema: Schema, row_ids: Vec<usize>) -> Result<Self> {
        if features.nrows() != labels.len() {
            return Err(Error::Data(format!("{} feature rows but {} labels", features.nrows(), labels.len())));
        }
        if row_ids.len() != labels.len() {
            return Err(Error::Data("row id count differs from row count".into()));
        }
        if features.nrows() > 0 && features.ncols() != schema.n_features() {
            return Err(Error::Data(format!(
                "schema declares {} predictors, matrix has {}",
                schema.n_features(),
                features.ncols()
            )));
        }
        if let Some(i) = labels.iter().position(|&y| y > 1) {
            return Err(Error::Data(format!("label {} at row {i} is not 0 or 1", labels[i])));
        }
        Ok(Self { features, labels, schema, row_ids })
    }

    /// Dataset with an anonymous schema; convenient for synthetic data.
    pub fn from_xy(features: Matrix<F>, labels: Vec<u8>) -> Result<Self> {
        let schema = Schema::anonymous(features.ncols());
        Self::new(features, labels, schema)
    }

    pub fn features(&self) -> &Matrix<F> {
        &self.features
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn row_ids(&self) -> &[usize] {
        &self.row_ids
    }

    pub fn n_samples(&self) -> usize {
        self.labels.len()
    }

    pub fn n_features(&self) -> usize {
        self.schema.n_features()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn n_positive(&self) -> usize {
        self.labels.iter().filter(|&&y| y == 1).count()
    }

    pub fn has_both_classes(&self) -> bool {
        let pos = self.n_positive();
        pos > 0 && pos < self.n_samples()
    }

    /// Rows at `idx`, in that order.
    pub fn subset(&self, idx: &[usize]) -> Self {
        Self {
            features: self.features.select_rows(idx),
            labels: idx.iter().map(|&i| self.labels[i]).collect(),
            schema: self.schema.clone(),
            row_ids: idx.iter().map(|&i| self.row_ids[i]).collect(),
        }
    }

    /// Keeps only the given predictor columns.
    pub fn select_features(&self, features: &[usize]) -> Self {
        Self {
            features: self.features.select_columns(features),
            labels: self.labels.clone(),
            schema: self.schema.select_features(features),
            row_ids: self.row_ids.clone(),
        }
    }

    pub(crate) fn with_features(&self, features: Matrix<F>) -> Self {
        Self { features, labels: self.labels.clone(), schema: self.schema.clone(), row_ids: self.row_ids.clone() }
    }

    /// Writes the dataset in file-column order, labels as integers.
    pub fn write_csv(&self, path: &Path, header: bool) -> Result<()> {
        std::fs::write(path, self.to_csv_string(header)).map_err(|e| Error::io(path, e))
    }

    pub fn to_csv_string(&self, header: bool) -> String {
        let mut out = String::new();
        if header {
            out.push_str(&self.schema.column_names.join(","));
            out.push('\n');
        }
        let label_col = self.schema.label_column;
        for r in 0..self.n_samples() {
            let row = self.features.row(r);
            let mut fields = Vec::with_capacity(row.len() + 1);
            let mut f = row.iter();
            for c in 0..self.schema.n_columns() {
                if c == label_col {
                    fields.push(self.labels[r].to_string());
                } else {
                    fields.push(f.next().expect("row width matches schema").to_string());
                }
            }
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        out
    }
}

/// Reads a CSV file laid out per `schema`. Values are returned uncleaned.
pub fn load_csv<F: Float>(path: &Path, schema: &Schema, has_header: bool) -> Result<Dataset<F>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv(file, path, schema, has_header)
}

/// Like [`load_csv`] but from any reader; `origin` is used in error messages.
pub fn read_csv<F: Float, R: Read>(reader: R, origin: &Path, schema: &Schema, has_header: bool) -> Result<Dataset<F>> {
    let mut rdr =
        csv::ReaderBuilder::new().has_headers(has_header).flexible(true).trim(csv::Trim::All).from_reader(reader);
    let ncols = schema.n_columns();
    let malformed = |row: usize, column: usize, message: String| Error::MalformedRow {
        path: origin.to_path_buf(),
        row,
        column,
        message,
    };
    if has_header {
        let header = rdr.headers().map_err(|e| Error::Data(format!("{}: {e}", origin.display())))?;
        if !header.is_empty() && header.len() != ncols {
            return Err(malformed(1, header.len(), format!("header has {} fields, schema has {ncols}", header.len())));
        }
    }
    let mut values = Vec::new();
    let mut labels = Vec::new();
    let first_line = if has_header { 2 } else { 1 };
    for (i, record) in rdr.records().enumerate() {
        let line = first_line + i;
        let record = record.map_err(|e| Error::Data(format!("{}: line {line}: {e}", origin.display())))?;
        if record.len() == 1 && record.get(0) == Some("") {
            continue;
        }
        if record.len() != ncols {
            return Err(malformed(
                line,
                record.len().min(ncols) + 1,
                format!("expected {ncols} fields, found {}", record.len()),
            ));
        }
        for (c, field) in record.iter().enumerate() {
            if c == schema.label_column {
                let label = match field.parse::<f64>() {
                    Ok(0.0) => 0u8,
                    Ok(1.0) => 1u8,
                    _ => {
                        return Err(malformed(line, c + 1, format!("label {field:?} is not 0 or 1")));
                    }
                };
                labels.push(label);
            } else {
                let v: F =
                    field.parse().map_err(|_| malformed(line, c + 1, format!("cannot parse {field:?} as a number")))?;
                values.push(v);
            }
        }
    }
    if labels.is_empty() {
        return Err(Error::Data(format!("{}: file contains no data rows", origin.display())));
    }
    let features = Matrix::new(labels.len(), schema.n_features(), values)?;
    Dataset::new(features, labels, schema.clone())
}

/// Per-column replacement counts from a cleaning step, keyed by feature name.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReplacementCounts {
    pub per_column: Vec<(String, usize)>,
}

impl ReplacementCounts {
    pub fn total(&self) -> usize {
        self.per_column.iter().map(|(_, n)| n).sum()
    }
}

/// Medians of the nonzero values of each sentinel column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct MedianImputer<F: Float> {
    medians: Vec<(usize, F)>,
}

impl<F: Float> MedianImputer<F> {
    pub fn fit(ds: &Dataset<F>) -> Result<Self> {
        let names = ds.schema().feature_names();
        let mut medians = Vec::new();
        for f in ds.schema().missing_feature_indices() {
            let nonzero: Vec<F> = ds.features().column(f).into_iter().filter(|v| !v.is_zero()).collect();
            let m = num::median(&nonzero).ok_or_else(|| {
                Error::Data(format!("column {:?} has no nonzero values to take a median of", names[f]))
            })?;
            medians.push((f, m));
        }
        Ok(Self { medians })
    }

    pub fn medians(&self) -> &[(usize, F)] {
        &self.medians
    }

    pub fn transform(&self, ds: &Dataset<F>) -> (Dataset<F>, ReplacementCounts) {
        let mut x = ds.features().clone();
        let names = ds.schema().feature_names();
        let mut counts = ReplacementCounts::default();
        for &(f, m) in &self.medians {
            let mut n = 0;
            for r in 0..x.nrows() {
                if x.get(r, f).is_zero() {
                    x.set(r, f, m);
                    n += 1;
                }
            }
            counts.per_column.push((names[f].clone(), n));
        }
        (ds.with_features(x), counts)
    }
}

/// Replaces zero sentinels in the schema's declared columns with the median
/// of that column's nonzero values.
pub fn impute_median<F: Float>(ds: &Dataset<F>) -> Result<Dataset<F>> {
    Ok(MedianImputer::fit(ds)?.transform(ds).0)
}

/// Tukey fences `[Q1 - m*IQR, Q3 + m*IQR]` and the replacement median, per predictor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct OutlierClipper<F: Float> {
    /// `None` when the column's IQR is zero; such columns are never touched.
    fences: Vec<Option<(F, F, F)>>,
    /// Columns whose zeros are missing-value sentinels, left for imputation.
    #[serde(default)]
    skip_zeros: Vec<bool>,
}

impl<F: Float> OutlierClipper<F> {
    pub fn fit(ds: &Dataset<F>, iqr_multiplier: f64) -> Result<Self> {
        Self::fit_inner(ds, iqr_multiplier, vec![false; ds.n_features()])
    }

    /// Like [`OutlierClipper::fit`], but zeros in the schema's missing-as-zero
    /// columns are ignored when computing fences and never replaced.
    pub fn fit_observed(ds: &Dataset<F>, iqr_multiplier: f64) -> Result<Self> {
        let mut skip = vec![false; ds.n_features()];
        for f in ds.schema().missing_feature_indices() {
            skip[f] = true;
        }
        Self::fit_inner(ds, iqr_multiplier, skip)
    }

    fn fit_inner(ds: &Dataset<F>, iqr_multiplier: f64, skip_zeros: Vec<bool>) -> Result<Self> {
        if !(iqr_multiplier > 0.0) {
            return Err(Error::Config(format!("iqr multiplier must be positive, got {iqr_multiplier}")));
        }
        let m = F::of(iqr_multiplier);
        let mut fences = Vec::with_capacity(ds.n_features());
        for (f, &skip) in skip_zeros.iter().enumerate().take(ds.n_features()) {
            let mut col = ds.features().column(f);
            if skip {
                col.retain(|v| !v.is_zero());
            }
            if col.is_empty() {
                fences.push(None);
                continue;
            }
            col.sort_by(|a, b| a.total_cmp_f(b));
            let q1 = num::quantile_sorted(&col, 0.25);
            let q3 = num::quantile_sorted(&col, 0.75);
            let iqr = q3 - q1;
            if iqr <= F::zero() {
                fences.push(None);
            } else {
                fences.push(Some((q1 - m * iqr, q3 + m * iqr, num::quantile_sorted(&col, 0.5))));
            }
        }
        Ok(Self { fences, skip_zeros })
    }

    pub fn transform(&self, ds: &Dataset<F>) -> (Dataset<F>, ReplacementCounts) {
        let mut x = ds.features().clone();
        let names = ds.schema().feature_names();
        let mut counts = ReplacementCounts::default();
        for (f, fence) in self.fences.iter().enumerate() {
            let skip = self.skip_zeros.get(f).copied().unwrap_or(false);
            let mut n = 0;
            if let Some((lo, hi, med)) = *fence {
                for r in 0..x.nrows() {
                    let v = x.get(r, f);
                    if (v < lo || v > hi) && !(skip && v.is_zero()) {
                        x.set(r, f, med);
                        n += 1;
                    }
                }
            }
            counts.per_column.push((names[f].clone(), n));
        }
        (ds.with_features(x), counts)
    }
}

/// Replaces values outside the IQR fences with the column median.
/// Returns the cleaned dataset and the number of values replaced.
pub fn clip_outliers<F: Float>(ds: &Dataset<F>, iqr_multiplier: f64) -> Result<(Dataset<F>, usize)> {
    let (out, counts) = OutlierClipper::fit(ds, iqr_multiplier)?.transform(ds);
    Ok((out, counts.total()))
}

/// Per-feature z-scoring. Constant columns are centered only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Standardizer<F: Float> {
    means: Vec<F>,
    scales: Vec<F>,
}

impl<F: Float> Standardizer<F> {
    pub fn fit(ds: &Dataset<F>) -> Self {
        let mut means = Vec::with_capacity(ds.n_features());
        let mut scales = Vec::with_capacity(ds.n_features());
        for f in 0..ds.n_features() {
            let col = ds.features().column(f);
            let sd = num::variance(&col).sqrt();
            means.push(num::mean(&col));
            scales.push(if sd > F::zero() { sd } else { F::one() });
        }
        Self { means, scales }
    }

    pub fn transform(&self, ds: &Dataset<F>) -> Dataset<F> {
        let mut x = ds.features().clone();
        for r in 0..x.nrows() {
            for (f, v) in x.row_mut(r).iter_mut().enumerate() {
                *v = (*v - self.means[f]) / self.scales[f];
            }
        }
        ds.with_features(x)
    }
}

/// `floor(fraction * n + 0.5)`.
pub fn train_size(n: usize, fraction: f64) -> usize {
    (fraction * n as f64 + 0.5).floor() as usize
}

/// Seeded random partition into `(train, test)`. Each part keeps the original
/// relative row order.
pub fn shuffle_split<F: Float>(ds: &Dataset<F>, train_fraction: f64, seed: u64) -> Result<(Dataset<F>, Dataset<F>)> {
    let (tr, te) = split_indices(ds.n_samples(), train_fraction, seed)?;
    Ok((ds.subset(&tr), ds.subset(&te)))
}

/// Index form of [`shuffle_split`].
pub fn split_indices(n: usize, train_fraction: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::Config(format!("train fraction must lie in (0, 1), got {train_fraction}")));
    }
    let n_train = train_size(n, train_fraction);
    if n_train == 0 || n_train >= n {
        return Err(Error::Config(format!("train fraction {train_fraction} on {n} samples leaves an empty partition")));
    }
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut rng::rng_from_seed(seed));
    let mut train = perm[..n_train].to_vec();
    let mut test = perm[n_train..].to_vec();
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

/// Assignment of every sample to one of `k` folds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldPlan {
    pub k: usize,
    pub assignments: Vec<usize>,
    pub stratified: bool,
    pub seed: u64,
}

impl FoldPlan {
    pub fn test_indices(&self, fold: usize) -> Vec<usize> {
        self.assignments.iter().enumerate().filter(|&(_, &f)| f == fold).map(|(i, _)| i).collect()
    }

    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        self.assignments.iter().enumerate().filter(|&(_, &f)| f != fold).map(|(i, _)| i).collect()
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &f in &self.assignments {
            sizes[f] += 1;
        }
        sizes
    }
}

/// Seeded k-fold assignment. Stratified plans deal positives round-robin,
/// then continue dealing negatives from the next fold, so both total and
/// per-class fold sizes differ by at most one.
pub fn make_folds<F: Float>(ds: &Dataset<F>, k: usize, stratified: bool, seed: u64) -> Result<FoldPlan> {
    fold_plan_for_labels(ds.labels(), k, stratified, seed)
}

pub fn fold_plan_for_labels(labels: &[u8], k: usize, stratified: bool, seed: u64) -> Result<FoldPlan> {
    let n = labels.len();
    if k < 2 {
        return Err(Error::Config(format!("k-fold needs k >= 2, got {k}")));
    }
    if k > n {
        return Err(Error::Config(format!("k = {k} exceeds the {n} available samples")));
    }
    let mut rng = rng::rng_from_seed(seed);
    let mut assignments = vec![0; n];
    if stratified {
        let mut pos: Vec<usize> = (0..n).filter(|&i| labels[i] == 1).collect();
        let mut neg: Vec<usize> = (0..n).filter(|&i| labels[i] != 1).collect();
        pos.shuffle(&mut rng);
        neg.shuffle(&mut rng);
        for (slot, &i) in pos.iter().chain(neg.iter()).enumerate() {
            assignments[i] = slot % k;
        }
    } else {
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut rng);
        for (slot, &i) in perm.iter().enumerate() {
            assignments[i] = slot % k;
        }
    }
    Ok(FoldPlan { k, assignments, stratified, seed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn one_col(values: &[f64], missing: bool) -> Dataset<f64> {
        let schema = Schema::new(
            vec!["a".into(), "y".into()],
            1,
            if missing { [0].into_iter().collect() } else { BTreeSet::new() },
        )
        .unwrap();
        let x = Matrix::new(values.len(), 1, values.to_vec()).unwrap();
        let y = (0..values.len()).map(|i| (i % 2) as u8).collect();
        Dataset::new(x, y, schema).unwrap()
    }

    #[test]
    fn schema_validation() {
        let names: Vec<String> = vec!["a".into(), "b".into()];
        assert!(Schema::new(names.clone(), 2, BTreeSet::new()).is_err());
        assert!(Schema::new(names.clone(), 1, [1].into_iter().collect()).is_err());
        assert!(Schema::new(vec!["a".into(), "a".into()], 1, BTreeSet::new()).is_err());
        assert!(Schema::new(names, 1, [0].into_iter().collect()).is_ok());
        let pima = Schema::pima();
        assert_eq!(pima.n_features(), 8);
        assert_eq!(pima.missing_feature_indices(), vec![1, 2, 3, 4, 5]);
    }

    #[test]
    fn feature_index_skips_label() {
        let s = Schema::new(vec!["y".into(), "a".into(), "b".into()], 0, BTreeSet::new()).unwrap();
        assert_eq!(s.feature_index(0), None);
        assert_eq!(s.feature_index(2), Some(1));
        assert_eq!(s.feature_names(), vec!["a".to_string(), "b".to_string()]);
    }

    #[test]
    fn minimal_csv() {
        let schema = Schema::anonymous(1);
        let ds: Dataset<f64> = read_csv("1,0\n".as_bytes(), Path::new("mem"), &schema, false).unwrap();
        assert_eq!(ds.n_samples(), 1);
        assert_eq!(ds.labels(), &[0]);
        assert_eq!(ds.features().get(0, 0), 1.0);
    }

    #[test]
    fn short_row_is_reported() {
        let schema = Schema::pima();
        let text = "Pregnancies,Glucose,BloodPressure,SkinThickness,Insulin,BMI,DiabetesPedigreeFunction,Age,Outcome\n\
                    6,148,72,35,0,33.6,0.627,50,1\n\
                    1,85,66,29,0,26.6,0.351,31\n";
        let err = read_csv::<f64, _>(text.as_bytes(), Path::new("pima.csv"), &schema, true).unwrap_err();
        match err {
            Error::MalformedRow { row, .. } => assert_eq!(row, 3),
            other => panic!("unexpected error {other:?}"),
        }
        assert!(err_string(text).contains("row 3"));
    }

    fn err_string(text: &str) -> String {
        read_csv::<f64, _>(text.as_bytes(), Path::new("pima.csv"), &Schema::pima(), true).unwrap_err().to_string()
    }

    #[test]
    fn non_binary_label_and_empty_file() {
        let schema = Schema::anonymous(1);
        let err = read_csv::<f64, _>("1,2\n".as_bytes(), Path::new("m"), &schema, false).unwrap_err();
        assert!(err.to_string().contains("not 0 or 1"));
        assert!(read_csv::<f64, _>("".as_bytes(), Path::new("m"), &schema, false).is_err());
        assert!(read_csv::<f64, _>("x0,y\n".as_bytes(), Path::new("m"), &schema, true).is_err());
        let err = read_csv::<f64, _>("abc,1\n".as_bytes(), Path::new("m"), &schema, false).unwrap_err();
        assert!(matches!(err, Error::MalformedRow { row: 1, column: 1, .. }));
    }

    #[test]
    fn median_imputation() {
        let ds = one_col(&[0.0, 2.0, 4.0, 6.0], true);
        let out = impute_median(&ds).unwrap();
        assert_eq!(out.features().column(0), vec![4.0, 2.0, 4.0, 6.0]);
        assert_eq!(out.labels(), ds.labels());

        let clean = one_col(&[1.0, 2.0, 3.0], true);
        assert_eq!(impute_median(&clean).unwrap(), clean);

        assert!(impute_median(&one_col(&[0.0, 0.0, 0.0], true)).is_err());
        // Undeclared columns are left alone.
        let untouched = one_col(&[0.0, 2.0], false);
        assert_eq!(impute_median(&untouched).unwrap(), untouched);
    }

    #[test]
    fn outlier_clipping() {
        let ds = one_col(&[1.0, 2.0, 2.0, 3.0, 100.0], false);
        let (out, n) = clip_outliers(&ds, 1.5).unwrap();
        assert_eq!(out.features().column(0), vec![1.0, 2.0, 2.0, 3.0, 2.0]);
        assert_eq!(n, 1);

        let constant = one_col(&[5.0; 6], false);
        assert_eq!(clip_outliers(&constant, 1.5).unwrap(), (constant.clone(), 0));
        assert_eq!(clip_outliers(&ds, 1e9).unwrap(), (ds.clone(), 0));
        assert!(clip_outliers(&ds, 0.0).is_err());
    }

    #[test]
    fn split_sizes() {
        assert_eq!(train_size(768, 0.7), 538);
        assert_eq!(train_size(10, 0.7), 7);
        let ds = one_col(&(0..10).map(f64::from).collect::<Vec<_>>(), false);
        let (tr, te) = shuffle_split(&ds, 0.7, 3).unwrap();
        assert_eq!((tr.n_samples(), te.n_samples()), (7, 3));
        let (tr2, te2) = shuffle_split(&ds, 0.7, 3).unwrap();
        assert_eq!(tr, tr2);
        assert_eq!(te, te2);
        assert!(shuffle_split(&ds, 0.01, 3).is_err());
        assert!(shuffle_split(&ds, 0.99, 3).is_err());
        assert!(shuffle_split(&ds, 1.0, 3).is_err());
    }

    #[test]
    fn fold_sizes() {
        let labels: Vec<u8> = (0..768).map(|i| (i % 3 == 0) as u8).collect();
        let plan = fold_plan_for_labels(&labels, 10, false, 1).unwrap();
        assert!(plan.fold_sizes().iter().all(|&s| s == 76 || s == 77));
        let plan = fold_plan_for_labels(&[0, 1, 0, 1], 4, true, 1).unwrap();
        assert_eq!(plan.fold_sizes(), vec![1, 1, 1, 1]);
        assert!(fold_plan_for_labels(&labels, 1, true, 1).is_err());
        assert!(fold_plan_for_labels(&[0, 1], 3, true, 1).is_err());
    }

    #[test]
    fn standardizer_centers_and_scales() {
        let ds = one_col(&[1.0, 2.0, 3.0, 4.0], false);
        let z = Standardizer::fit(&ds).transform(&ds);
        let col = z.features().column(0);
        assert!(num::mean(&col).abs() < 1e-12);
        assert!((num::variance(&col) - 1.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn imputation_is_idempotent(values in proptest::collection::vec(0u8..5, 1..40)) {
            let vals: Vec<f64> = values.iter().map(|&v| f64::from(v)).collect();
            prop_assume!(vals.iter().any(|&v| v != 0.0));
            let ds = one_col(&vals, true);
            let once = impute_median(&ds).unwrap();
            let twice = impute_median(&once).unwrap();
            prop_assert_eq!(once, twice);
        }

        #[test]
        fn split_is_a_partition(n in 2usize..200, frac in 0.05f64..0.95, seed in any::<u64>()) {
            let n_train = train_size(n, frac);
            prop_assume!(n_train > 0 && n_train < n);
            let (tr, te) = split_indices(n, frac, seed).unwrap();
            prop_assert_eq!(tr.len(), n_train);
            let mut all: Vec<usize> = tr.iter().chain(te.iter()).copied().collect();
            all.sort_unstable();
            prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
            prop_assert_eq!(split_indices(n, frac, seed).unwrap(), (tr, te));
        }

        #[test]
        fn folds_cover_and_balance(labels in proptest::collection::vec(0u8..2, 2..150), k in 2usize..16, seed in any::<u64>(), stratified in any::<bool>()) {
            prop_assume!(k <= labels.len());
            let plan = fold_plan_for_labels(&labels, k, stratified, seed).unwrap();
            prop_assert_eq!(plan.assignments.len(), labels.len());
            prop_assert!(plan.assignments.iter().all(|&f| f < k));
            let sizes = plan.fold_sizes();
            prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
            if stratified {
                let mut pos = vec![0usize; k];
                for (i, &f) in plan.assignments.iter().enumerate() {
                    pos[f] += labels[i] as usize;
                }
                prop_assert!(pos.iter().max().unwrap() - pos.iter().min().unwrap() <= 1);
            }
            prop_assert_eq!(fold_plan_for_labels(&labels, k, stratified, seed).unwrap(), plan);
        }
    }
}
