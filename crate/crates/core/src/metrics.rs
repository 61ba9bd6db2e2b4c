//! Binary one-vs-rest evaluation measures against the target class.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("input: {0}")]
    Input(String),
    #[error("beta must be positive, got {0}")]
    Beta(f64),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl ConfusionCounts {
    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.tn + self.fn_
    }
}

pub fn confusion_from_labels(y_true: &[usize], y_pred: &[usize], target_class: usize) -> Result<ConfusionCounts, MetricsError> {
    if y_true.len() != y_pred.len() {
        return Err(MetricsError::Input(format!("{} true labels vs {} predictions", y_true.len(), y_pred.len())));
    }
    if y_true.is_empty() {
        return Err(MetricsError::Input("no samples".into()));
    }
    let mut c = ConfusionCounts::default();
    for (&t, &p) in y_true.iter().zip(y_pred) {
        match (t == target_class, p == target_class) {
            (true, true) => c.tp += 1,
            (false, true) => c.fp += 1,
            (false, false) => c.tn += 1,
            (true, false) => c.fn_ += 1,
        }
    }
    Ok(c)
}

/// F-beta of a precision/recall pair, and whether the 0/0 convention applied.
pub fn fbeta(precision: f64, recall: f64, beta: f64) -> Result<(f64, bool), MetricsError> {
    if beta.is_nan() || beta <= 0.0 || beta.is_infinite() {
        return Err(MetricsError::Beta(beta));
    }
    for v in [precision, recall] {
        if !(0.0..=1.0).contains(&v) {
            return Err(MetricsError::Input(format!("{v} is not in [0, 1]")));
        }
    }
    let b2 = beta * beta;
    let denom = b2 * precision + recall;
    if denom == 0.0 {
        return Ok((0.0, true));
    }
    Ok(((1.0 + b2) * precision * recall / denom, false))
}

/// `(1 + b^2) P R / (b^2 P + R)`, with P = R = 0 giving 0.
pub fn compute_fbeta(precision: f64, recall: f64, beta: f64) -> Result<f64, MetricsError> {
    fbeta(precision, recall, beta).map(|(v, _)| v)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct DegenerateFlags {
    /// tp + fp = 0
    pub precision: bool,
    /// tp + fn = 0
    pub recall: bool,
    pub f1: bool,
    pub f0_5: bool,
    pub f2: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricsReport {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub f0_5: f64,
    pub f2: f64,
    pub misclassifications: u64,
    pub counts: ConfusionCounts,
    pub degenerate: DegenerateFlags,
}

fn ratio(num: u64, den: u64) -> (f64, bool) {
    if den == 0 {
        (0.0, true)
    } else {
        (num as f64 / den as f64, false)
    }
}

pub fn compute_report(counts: ConfusionCounts) -> Result<MetricsReport, MetricsError> {
    let total = counts.total();
    if total == 0 {
        return Err(MetricsError::Input("no samples".into()));
    }
    let (precision, dp) = ratio(counts.tp, counts.tp + counts.fp);
    let (recall, dr) = ratio(counts.tp, counts.tp + counts.fn_);
    let (f1, d1) = fbeta(precision, recall, 1.0)?;
    let (f0_5, d05) = fbeta(precision, recall, 0.5)?;
    let (f2, d2) = fbeta(precision, recall, 2.0)?;
    Ok(MetricsReport {
        accuracy: (counts.tp + counts.tn) as f64 / total as f64,
        precision,
        recall,
        f1,
        f0_5,
        f2,
        misclassifications: counts.fp + counts.fn_,
        counts,
        degenerate: DegenerateFlags { precision: dp, recall: dr, f1: d1 || dp || dr, f0_5: d05 || dp || dr, f2: d2 || dp || dr },
    })
}

impl fmt::Display for MetricsReport {
    /// Flat `key=value` lines.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = &self.counts;
        let d = &self.degenerate;
        writeln!(f, "tp={}", c.tp)?;
        writeln!(f, "fp={}", c.fp)?;
        writeln!(f, "tn={}", c.tn)?;
        writeln!(f, "fn={}", c.fn_)?;
        writeln!(f, "misclassifications={}", self.misclassifications)?;
        writeln!(f, "accuracy={:.6}", self.accuracy)?;
        writeln!(f, "precision={:.6}", self.precision)?;
        writeln!(f, "recall={:.6}", self.recall)?;
        writeln!(f, "f1={:.6}", self.f1)?;
        writeln!(f, "f0_5={:.6}", self.f0_5)?;
        writeln!(f, "f2={:.6}", self.f2)?;
        let flags: Vec<&str> = [
            (d.precision, "precision"),
            (d.recall, "recall"),
            (d.f1, "f1"),
            (d.f0_5, "f0_5"),
            (d.f2, "f2"),
        ]
        .iter()
        .filter(|(on, _)| *on)
        .map(|(_, n)| *n)
        .collect();
        writeln!(f, "degenerate={}", flags.join(","))
    }
}
