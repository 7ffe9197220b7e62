//! Partial dependence: the marginal effect of one feature on a class
//! probability, averaged over the data with the feature overridden to each
//! grid value. Grids use the distinct values of low-cardinality columns
//! and 20 evenly spaced quantiles otherwise; decile tick marks of the
//! empirical distribution ride along for plotting.

use rayon::prelude::*;
use serde::Serialize;

use crate::forest::ForestModel;
use crate::labeling::LabelClass;
use crate::rng::shuffle_indices;
use crate::scalar::quantile;
use crate::{Real, Result};

pub const GRID_POINTS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdpOptions {
    /// Rows above this count are subsampled (seeded); `None` disables.
    pub subsample_above: Option<usize>,
    pub seed: u64,
}

impl Default for PdpOptions {
    fn default() -> Self {
        PdpOptions {
            subsample_above: Some(50_000),
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PdpGrid {
    pub feature: String,
    pub class: String,
    /// Ascending, deduplicated grid values.
    pub grid: Vec<Real>,
    /// Mean predicted class probability with the feature forced to each
    /// grid value, aligned with `grid`.
    pub mean_probability: Vec<Real>,
    /// Empirical 10%..90% quantiles of the raw column.
    pub deciles: Vec<Real>,
}

fn grid_values(column: &[Real]) -> Vec<Real> {
    let mut distinct = column.to_vec();
    distinct.sort_by(|a, b| a.partial_cmp(b).expect("finite feature values"));
    distinct.dedup();
    if distinct.len() <= GRID_POINTS {
        return distinct;
    }
    let mut sorted = column.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite feature values"));
    let mut grid: Vec<Real> = (0..GRID_POINTS)
        .map(|i| quantile(&sorted, i as Real / (GRID_POINTS - 1) as Real))
        .collect();
    grid.dedup();
    grid
}

pub fn partial_dependence(
    model: &ForestModel,
    x: &[Vec<Real>],
    feature: usize,
    class: LabelClass,
    options: &PdpOptions,
) -> Result<PdpGrid> {
    let rows: Vec<&Vec<Real>> = match options.subsample_above {
        Some(cap) if x.len() > cap => shuffle_indices(options.seed, &["pdp", "rows"], x.len())
            [..cap]
            .iter()
            .map(|&i| &x[i])
            .collect(),
        _ => x.iter().collect(),
    };

    let column: Vec<Real> = x.iter().map(|r| r[feature]).collect();
    let grid = grid_values(&column);
    let mut sorted = column;
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite feature values"));
    let deciles: Vec<Real> = (1..=9).map(|d| quantile(&sorted, d as Real / 10.0)).collect();

    let class_idx = class.index();
    let mean_probability: Vec<Real> = grid
        .par_iter()
        .map(|&g| {
            let mut sum = 0.0;
            let mut patched: Vec<Real> = Vec::new();
            for row in &rows {
                patched.clear();
                patched.extend_from_slice(row);
                patched[feature] = g;
                sum += model.predict_probabilities(&patched)[class_idx];
            }
            sum / rows.len() as Real
        })
        .collect();

    Ok(PdpGrid {
        feature: model.feature_names[feature].clone(),
        class: class.to_string(),
        grid,
        mean_probability,
        deciles,
    })
}
