//! One-vs-rest ROC-AUC via the rank-statistic (Mann–Whitney) form.
//!
//! Tied scores receive midranks, which makes a constant predictor score
//! exactly 0.5. The macro average is unweighted over the classes that have
//! both positives and negatives in the truth; if no class qualifies the
//! AUC is undefined.

use crate::forest::Prediction;
use crate::labeling::LabelClass;
use crate::{Error, Real, Result};

/// AUC of `scores` against a binary truth, or `None` when either side is
/// empty. Equal scores share the average of the ranks they span.
pub fn binary_auc(scores: &[Real], positive: &[bool]) -> Option<Real> {
    assert_eq!(scores.len(), positive.len());
    let n = scores.len();
    let n_pos = positive.iter().filter(|&&p| p).count();
    let n_neg = n - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return None;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| scores[a].partial_cmp(&scores[b]).expect("finite scores"));

    // midranks: a tie group spanning sorted positions i..j (1-based ranks
    // i+1..=j) all get (i + j + 1) / 2
    let mut rank_sum_pos = 0.0;
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && scores[order[j]] == scores[order[i]] {
            j += 1;
        }
        let rank = (i + j + 1) as Real / 2.0;
        for &idx in &order[i..j] {
            if positive[idx] {
                rank_sum_pos += rank;
            }
        }
        i = j;
    }

    let n_pos_r = n_pos as Real;
    let n_neg_r = n_neg as Real;
    Some((rank_sum_pos - n_pos_r * (n_pos_r + 1.0) / 2.0) / (n_pos_r * n_neg_r))
}

/// Per-class one-vs-rest AUC over the canonical class order; `None` where
/// a class lacks positives or negatives in the truth.
pub fn per_class_auc(preds: &[Prediction], truth: &[LabelClass]) -> Vec<Option<Real>> {
    LabelClass::ORDER
        .iter()
        .map(|&class| {
            let scores: Vec<Real> = preds
                .iter()
                .map(|p| p.class_probabilities[class.index()])
                .collect();
            let positive: Vec<bool> = truth.iter().map(|&t| t == class).collect();
            binary_auc(&scores, &positive)
        })
        .collect()
}

/// Unweighted mean of the defined per-class AUCs; `SingleClassTruth` when
/// none is defined.
pub fn macro_ovr_auc(preds: &[Prediction], truth: &[LabelClass]) -> Result<Real> {
    let defined: Vec<Real> = per_class_auc(preds, truth).into_iter().flatten().collect();
    if defined.is_empty() {
        return Err(Error::SingleClassTruth);
    }
    Ok(defined.iter().sum::<Real>() / defined.len() as Real)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forest::baseline_balanced;
    use crate::labeling::LabelClass::*;

    #[test]
    fn perfect_ranking_scores_one() {
        let auc = binary_auc(&[0.9, 0.8, 0.3], &[true, true, false]).unwrap();
        assert_eq!(auc, 1.0);
    }

    #[test]
    fn inverted_ranking_scores_zero() {
        let auc = binary_auc(&[0.1, 0.2, 0.9], &[true, true, false]).unwrap();
        assert_eq!(auc, 0.0);
    }

    #[test]
    fn constant_scores_give_exactly_half() {
        let scores = vec![0.7; 100];
        let positive: Vec<bool> = (0..100).map(|i| i % 3 == 0).collect();
        assert_eq!(binary_auc(&scores, &positive), Some(0.5));
    }

    #[test]
    fn single_sided_truth_is_undefined() {
        assert_eq!(binary_auc(&[0.1, 0.9], &[true, true]), None);
        assert_eq!(binary_auc(&[0.1, 0.9], &[false, false]), None);
    }

    #[test]
    fn midrank_handles_partial_ties() {
        // scores: pos 0.5, neg 0.5, neg 0.2 → tied pair contributes 0.5,
        // the lower negative is fully below: auc = (0.5 + 1) / 2 = 0.75
        let auc = binary_auc(&[0.5, 0.5, 0.2], &[true, false, false]).unwrap();
        assert_eq!(auc, 0.75);
    }

    #[test]
    fn constant_multiclass_predictor_macro_is_exactly_half() {
        let truth = vec![Balanced, Permissive, Restrictive, Unspecialized, Balanced];
        let preds = baseline_balanced(truth.len());
        assert_eq!(macro_ovr_auc(&preds, &truth).unwrap(), 0.5);
    }

    #[test]
    fn single_class_truth_is_an_error() {
        let truth = vec![Balanced; 4];
        let preds = baseline_balanced(4);
        assert!(matches!(
            macro_ovr_auc(&preds, &truth),
            Err(Error::SingleClassTruth)
        ));
    }
}
