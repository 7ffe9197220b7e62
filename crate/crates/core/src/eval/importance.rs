//! Permutation feature importance.
//!
//! Each feature column of the held-out matrix is shuffled ten times on its
//! own named stream; the importance sample is the macro AUC lost relative
//! to the unshuffled baseline. Streams are keyed by feature name, not
//! column position, so reported values do not depend on column order.

use rayon::prelude::*;
use serde::Serialize;

use crate::eval::roc::macro_ovr_auc;
use crate::forest::ForestModel;
use crate::labeling::LabelClass;
use crate::rng::shuffle_indices;
use crate::scalar::quantile;
use crate::{Real, Result};

pub const REPETITIONS: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeatureImportance {
    pub feature: String,
    /// AUC drop per repetition, in repetition order.
    pub samples: Vec<Real>,
    pub mean: Real,
    pub q1: Real,
    pub median: Real,
    pub q3: Real,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ImportanceReport {
    pub seed: u64,
    pub baseline_macro_auc: Real,
    /// One entry per feature, in the model's column order.
    pub features: Vec<FeatureImportance>,
}

impl ImportanceReport {
    /// Feature names sorted by descending mean drop (ties by name).
    pub fn ranking(&self) -> Vec<String> {
        let mut order: Vec<&FeatureImportance> = self.features.iter().collect();
        order.sort_by(|a, b| {
            b.mean
                .partial_cmp(&a.mean)
                .expect("finite importance")
                .then_with(|| a.feature.cmp(&b.feature))
        });
        order.iter().map(|f| f.feature.clone()).collect()
    }
}

pub fn permutation_importance(
    model: &ForestModel,
    x: &[Vec<Real>],
    y: &[LabelClass],
    seed: u64,
) -> Result<ImportanceReport> {
    let baseline_preds = model.predict_matrix(x)?;
    let baseline = macro_ovr_auc(&baseline_preds, y)?;
    let n = x.len();

    let features: Vec<FeatureImportance> = model
        .feature_names
        .par_iter()
        .enumerate()
        .map(|(j, name)| -> Result<FeatureImportance> {
            let column: Vec<Real> = x.iter().map(|r| r[j]).collect();
            let mut samples = Vec::with_capacity(REPETITIONS);
            let mut permuted = x.to_vec();
            for rep in 0..REPETITIONS {
                let perm = shuffle_indices(seed, &["importance", name, &rep.to_string()], n);
                for (row, &src) in permuted.iter_mut().zip(&perm) {
                    row[j] = column[src];
                }
                let preds = model.predict_matrix(&permuted)?;
                samples.push(baseline - macro_ovr_auc(&preds, y)?);
            }
            let mut sorted = samples.clone();
            sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite drops"));
            Ok(FeatureImportance {
                feature: name.clone(),
                mean: samples.iter().sum::<Real>() / REPETITIONS as Real,
                q1: quantile(&sorted, 0.25),
                median: quantile(&sorted, 0.5),
                q3: quantile(&sorted, 0.75),
                samples,
            })
        })
        .collect::<Result<_>>()?;

    Ok(ImportanceReport {
        seed,
        baseline_macro_auc: baseline,
        features,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forest::{train_forest, ForestParams};
    use crate::labeling::LabelClass::*;

    /// Two-feature data where only the first column carries signal and the
    /// third column is entirely ignored by construction (constant).
    fn planted() -> (Vec<Vec<Real>>, Vec<LabelClass>, Vec<String>) {
        let n = 300;
        let x: Vec<Vec<Real>> = (0..n)
            .map(|i| {
                vec![
                    (i as Real) - (n / 2) as Real, // signal
                    ((i * 37) % 23) as Real,       // noise
                    5.0,                           // constant, never split on
                ]
            })
            .collect();
        let y = x
            .iter()
            .map(|r| if r[0] > 0.0 { Permissive } else { Balanced })
            .collect();
        let names = vec!["signal".to_string(), "noise".to_string(), "flat".to_string()];
        (x, y, names)
    }

    #[test]
    fn planted_signal_dominates_and_unused_feature_drops_zero() {
        let (x, y, names) = planted();
        let model = train_forest(
            &x,
            &y,
            &names,
            &ForestParams {
                n_trees: 60,
                min_samples_split: 4,
            },
            3,
        )
        .unwrap();
        let report = permutation_importance(&model, &x, &y, 17).unwrap();

        assert_eq!(report.features.len(), 3);
        for f in &report.features {
            assert_eq!(f.samples.len(), REPETITIONS);
        }
        assert_eq!(report.ranking()[0], "signal");

        let flat = report.features.iter().find(|f| f.feature == "flat").unwrap();
        assert!(flat.samples.iter().all(|&s| s == 0.0));
        assert_eq!(flat.mean, 0.0);

        let noise = report.features.iter().find(|f| f.feature == "noise").unwrap();
        assert!(noise.mean.abs() <= 0.01, "noise mean drop {}", noise.mean);
    }

    #[test]
    fn importance_is_reproducible() {
        let (x, y, names) = planted();
        let model = train_forest(
            &x,
            &y,
            &names,
            &ForestParams {
                n_trees: 20,
                min_samples_split: 8,
            },
            5,
        )
        .unwrap();
        let a = permutation_importance(&model, &x, &y, 9).unwrap();
        let b = permutation_importance(&model, &x, &y, 9).unwrap();
        assert_eq!(a, b);
    }
}
