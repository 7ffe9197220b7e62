//! Collinearity audit over the feature matrix.
//!
//! Reports Pearson correlations for every feature pair and flags strongly
//! correlated ones, naming which member of the pair the configured
//! keep-list prefers. The audit only reports — it never drops or rewrites
//! columns.

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::scalar::Scalar;
use crate::Real;

/// Absolute correlation above which a pair is flagged.
pub const FLAG_THRESHOLD: Real = 0.7;

/// Pearson product-moment correlation; `None` when either input is
/// constant (zero variance makes r undefined).
pub fn pearson<F: Scalar>(x: &[F], y: &[F]) -> Option<F> {
    assert_eq!(x.len(), y.len());
    if x.is_empty() {
        return None;
    }
    let n = F::from_count(x.len());
    let mean_x = x.iter().copied().fold(F::zero(), |a, v| a + v) / n;
    let mean_y = y.iter().copied().fold(F::zero(), |a, v| a + v) / n;
    let mut cov = F::zero();
    let mut var_x = F::zero();
    let mut var_y = F::zero();
    for (&xi, &yi) in x.iter().zip(y) {
        let dx = xi - mean_x;
        let dy = yi - mean_y;
        cov += dx * dy;
        var_x += dx * dx;
        var_y += dy * dy;
    }
    if var_x == F::zero() || var_y == F::zero() {
        return None;
    }
    Some(cov / (var_x * var_y).sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationPair {
    pub feature_a: String,
    pub feature_b: String,
    pub r: Real,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlaggedPair {
    pub feature_a: String,
    pub feature_b: String,
    pub r: Real,
    /// Which member the keep-list (or column order, as fallback) prefers.
    pub keep: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationReport {
    pub pairs: Vec<CorrelationPair>,
    pub flagged: Vec<FlaggedPair>,
    /// Features with zero variance; correlation is undefined for them and
    /// they are left out of `pairs`.
    pub constant_columns: Vec<String>,
}

/// Audit all feature pairs of a dataset. `keep_list` ranks features by
/// preference when a flagged pair must name a keeper; features absent from
/// the list fall back to dataset column order.
pub fn audit(dataset: &Dataset, keep_list: &[String]) -> CorrelationReport {
    let d = dataset.n_features();
    let columns: Vec<Vec<Real>> = (0..d)
        .map(|j| dataset.rows.iter().map(|r| r[j]).collect())
        .collect();

    let mut constant = vec![false; d];
    for (j, col) in columns.iter().enumerate() {
        constant[j] = col.windows(2).all(|w| w[0] == w[1]);
    }

    let prefer = |a: usize, b: usize| -> String {
        let name_a = &dataset.feature_names[a];
        let name_b = &dataset.feature_names[b];
        let rank = |name: &str| keep_list.iter().position(|k| k == name);
        match (rank(name_a), rank(name_b)) {
            (Some(ra), Some(rb)) if rb < ra => name_b.clone(),
            (Some(_), _) => name_a.clone(),
            (None, Some(_)) => name_b.clone(),
            (None, None) => name_a.clone(), // earlier column wins
        }
    };

    let mut pairs = Vec::new();
    let mut flagged = Vec::new();
    for a in 0..d {
        for b in (a + 1)..d {
            if constant[a] || constant[b] {
                continue;
            }
            let r = pearson(&columns[a], &columns[b]).expect("non-constant columns");
            pairs.push(CorrelationPair {
                feature_a: dataset.feature_names[a].clone(),
                feature_b: dataset.feature_names[b].clone(),
                r,
            });
            if r.abs() > FLAG_THRESHOLD {
                flagged.push(FlaggedPair {
                    feature_a: dataset.feature_names[a].clone(),
                    feature_b: dataset.feature_names[b].clone(),
                    r,
                    keep: prefer(a, b),
                });
            }
        }
    }

    let constant_columns = (0..d)
        .filter(|&j| constant[j])
        .map(|j| dataset.feature_names[j].clone())
        .collect();

    CorrelationReport {
        pairs,
        flagged,
        constant_columns,
    }
}
