//! Confusion-matrix metrics: per-class precision/recall/F1, the
//! support-weighted F1 aggregate, and the assembled evaluation report.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::eval::roc::{macro_ovr_auc, per_class_auc};
use crate::forest::Prediction;
use crate::labeling::LabelClass;
use crate::{Error, Real, Result};

/// Counts with truth on rows and prediction on columns, both in canonical
/// class order.
pub fn confusion_matrix(preds: &[Prediction], truth: &[LabelClass]) -> Vec<Vec<u32>> {
    let k = LabelClass::ORDER.len();
    let mut m = vec![vec![0u32; k]; k];
    for (p, &t) in preds.iter().zip(truth) {
        m[t.index()][p.predicted.index()] += 1;
    }
    m
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassMetrics {
    pub precision: Real,
    pub recall: Real,
    pub f1: Real,
    pub support: u32,
}

fn ratio(num: Real, den: Real) -> Real {
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// Per-class precision/recall/F1 straight from the confusion matrix;
/// undefined ratios (empty row or column) fall back to 0.
pub fn per_class_metrics(confusion: &[Vec<u32>]) -> BTreeMap<String, ClassMetrics> {
    let k = LabelClass::ORDER.len();
    let mut out = BTreeMap::new();
    for (c, class) in LabelClass::ORDER.iter().enumerate() {
        let tp = confusion[c][c] as Real;
        let row: Real = confusion[c].iter().sum::<u32>() as Real;
        let col: Real = (0..k).map(|r| confusion[r][c]).sum::<u32>() as Real;
        let precision = ratio(tp, col);
        let recall = ratio(tp, row);
        let f1 = ratio(2.0 * precision * recall, precision + recall);
        out.insert(
            class.to_string(),
            ClassMetrics {
                precision,
                recall,
                f1,
                support: row as u32,
            },
        );
    }
    out
}

/// F1 averaged with each class weighted by its share of the truth.
pub fn weighted_f1(per_class: &BTreeMap<String, ClassMetrics>) -> Real {
    let total: u32 = per_class.values().map(|m| m.support).sum();
    if total == 0 {
        return 0.0;
    }
    LabelClass::ORDER
        .iter()
        .map(|class| {
            let m = &per_class[&class.to_string()];
            m.support as Real / total as Real * m.f1
        })
        .sum()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvaluationReport {
    pub confusion: Vec<Vec<u32>>,
    pub per_class: BTreeMap<String, ClassMetrics>,
    pub weighted_f1: Real,
    /// Absent (not zero) when the truth contains a single class.
    pub macro_ovr_roc_auc: Option<Real>,
    pub per_class_auc: BTreeMap<String, Option<Real>>,
}

/// Full held-out evaluation of a prediction set.
pub fn evaluate(preds: &[Prediction], truth: &[LabelClass]) -> Result<EvaluationReport> {
    if preds.len() != truth.len() {
        return Err(Error::FeatureArity {
            got: preds.len(),
            expected: truth.len(),
        });
    }
    let confusion = confusion_matrix(preds, truth);
    let per_class = per_class_metrics(&confusion);
    let weighted = weighted_f1(&per_class);
    let macro_auc = match macro_ovr_auc(preds, truth) {
        Ok(v) => Some(v),
        Err(Error::SingleClassTruth) => None,
        Err(e) => return Err(e),
    };
    let auc_by_class = LabelClass::ORDER
        .iter()
        .zip(per_class_auc(preds, truth))
        .map(|(c, a)| (c.to_string(), a))
        .collect();
    Ok(EvaluationReport {
        confusion,
        per_class,
        weighted_f1: weighted,
        macro_ovr_roc_auc: macro_auc,
        per_class_auc: auc_by_class,
    })
}
