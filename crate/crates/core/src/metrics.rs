//! Binary confusion-matrix statistics and ROC analysis.
//!
//! `fscore` is the harmonic mean of sensitivity and specificity. The usual
//! precision/recall F1 is available separately as [`f1`]. Any ratio with a
//! zero denominator is [`Metric::Undefined`], never a silent zero.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: u64,
    pub tn: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl ConfusionMatrix {
    pub fn total(&self) -> u64 {
        self.tp + self.tn + self.fp + self.fn_
    }
}

/// A metric value, or the marker for a zero denominator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Metric {
    Value(f64),
    Undefined,
}

impl Metric {
    fn ratio(num: u64, den: u64) -> Self {
        if den == 0 {
            Metric::Undefined
        } else {
            Metric::Value(num as f64 / den as f64)
        }
    }

    pub fn value(self) -> Option<f64> {
        match self {
            Metric::Value(v) => Some(v),
            Metric::Undefined => None,
        }
    }

    pub fn is_defined(self) -> bool {
        matches!(self, Metric::Value(_))
    }
}

impl From<Option<f64>> for Metric {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Metric::Undefined, Metric::Value)
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Metric::Value(v) => match f.precision() {
                Some(p) => write!(f, "{v:.p$}"),
                None => write!(f, "{v}"),
            },
            Metric::Undefined => f.write_str("n/a"),
        }
    }
}

impl Serialize for Metric {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Metric::Value(v) => s.serialize_f64(*v),
            Metric::Undefined => s.serialize_str("n/a"),
        }
    }
}

impl<'de> Deserialize<'de> for Metric {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(Metric::Value(v)),
            Raw::Text(t) if t == "n/a" => Ok(Metric::Undefined),
            Raw::Text(t) => Err(serde::de::Error::custom(format!("expected a number or \"n/a\", got {t:?}"))),
        }
    }
}

/// Tallies predictions against truth; class 1 is positive.
pub fn confusion(y_true: &[u8], y_pred: &[u8]) -> Result<ConfusionMatrix> {
    if y_true.len() != y_pred.len() {
        return Err(Error::Data(format!("y_true has {} labels, y_pred has {}", y_true.len(), y_pred.len())));
    }
    let mut cm = ConfusionMatrix::default();
    for (&t, &p) in y_true.iter().zip(y_pred) {
        match (t, p) {
            (1, 1) => cm.tp += 1,
            (0, 0) => cm.tn += 1,
            (0, 1) => cm.fp += 1,
            (1, 0) => cm.fn_ += 1,
            _ => return Err(Error::Data(format!("labels must be 0 or 1, got ({t}, {p})"))),
        }
    }
    Ok(cm)
}

pub fn accuracy(cm: &ConfusionMatrix) -> Metric {
    Metric::ratio(cm.tp + cm.tn, cm.total())
}

/// TP / (TP + FN).
pub fn sensitivity(cm: &ConfusionMatrix) -> Metric {
    Metric::ratio(cm.tp, cm.tp + cm.fn_)
}

/// TN / (TN + FP).
pub fn specificity(cm: &ConfusionMatrix) -> Metric {
    Metric::ratio(cm.tn, cm.tn + cm.fp)
}

/// 2·Sp·Sn / (Sp + Sn).
pub fn fscore(cm: &ConfusionMatrix) -> Metric {
    match (sensitivity(cm), specificity(cm)) {
        (Metric::Value(sn), Metric::Value(sp)) if sn + sp > 0.0 => Metric::Value(2.0 * sp * sn / (sp + sn)),
        _ => Metric::Undefined,
    }
}

pub fn precision(cm: &ConfusionMatrix) -> Metric {
    Metric::ratio(cm.tp, cm.tp + cm.fp)
}

/// Conventional F1 = 2·TP / (2·TP + FP + FN).
pub fn f1(cm: &ConfusionMatrix) -> Metric {
    Metric::ratio(2 * cm.tp, 2 * cm.tp + cm.fp + cm.fn_)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocCurve {
    /// `(fpr, tpr)` pairs from `(0, 0)` to `(1, 1)`.
    pub points: Vec<(f64, f64)>,
    /// Score cutoff of each point; the leading anchor uses `+inf`.
    #[serde(skip)]
    pub thresholds: Vec<f64>,
}

impl RocCurve {
    /// Two-column `fpr,tpr` CSV.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("fpr,tpr\n");
        for (x, y) in &self.points {
            out.push_str(&format!("{x},{y}\n"));
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv()).map_err(|e| Error::io(path, e))
    }
}

/// ROC points at every distinct score, in descending order; a sample is
/// called positive when its score is at least the threshold.
pub fn roc_curve(y_true: &[u8], scores: &[f64]) -> Result<RocCurve> {
    if y_true.len() != scores.len() {
        return Err(Error::Data(format!("{} labels but {} scores", y_true.len(), scores.len())));
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::Data("scores contain NaN".into()));
    }
    let n_pos = y_true.iter().filter(|&&y| y == 1).count();
    let n_neg = y_true.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::Data("ROC analysis needs both classes present".into()));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));

    let mut points = vec![(0.0, 0.0)];
    let mut thresholds = vec![f64::INFINITY];
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut i = 0;
    while i < order.len() {
        let t = scores[order[i]];
        while i < order.len() && scores[order[i]] == t {
            if y_true[order[i]] == 1 {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        points.push((fp as f64 / n_neg as f64, tp as f64 / n_pos as f64));
        thresholds.push(t);
    }
    Ok(RocCurve { points, thresholds })
}

/// Trapezoidal area under the curve.
pub fn auc(curve: &RocCurve) -> f64 {
    curve.points.windows(2).map(|w| (w[1].0 - w[0].0) * (w[0].1 + w[1].1) / 2.0).sum()
}
