//! Deterministic random-forest classifier.
//!
//! An ensemble of CART trees over bootstrap samples, with per-tree RNG
//! streams derived from (master seed, tree index) so training order and
//! thread count never influence the result. Class probabilities are the
//! mean of leaf class proportions across trees; ties in the argmax break
//! toward the earlier class in the canonical order. Ships with the two
//! reference baselines (training-prior sampling and constant-Balanced),
//! a stratified 80/20 split, and 10-fold cross-validated tuning.

pub mod tree;

use std::path::Path;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{Provenance, RunConfig};
use crate::labeling::LabelClass;
use crate::rng::{derive_seed, shuffle_indices, stream};
use crate::{Error, Real, Result};

pub use tree::{gini, DecisionTree, TreeNode};

use tree::{grow_tree, GrowthParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForestParams {
    pub n_trees: usize,
    pub min_samples_split: usize,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            n_trees: 500,
            min_samples_split: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestModel {
    pub format_version: u32,
    pub class_order: Vec<String>,
    pub feature_names: Vec<String>,
    pub n_trees: usize,
    pub min_samples_split: usize,
    pub features_per_split: usize,
    pub seed: u64,
    /// Whether the surrounding train/test split was stratified. Training
    /// itself never splits; this is carried so the saved model describes
    /// how to reconstruct its own held-out set from `seed`.
    #[serde(default = "default_true")]
    pub stratified: bool,
    /// Training label counts per class; a zero marks a class the model can
    /// never predict above zero probability.
    pub class_counts: Vec<u32>,
    pub trees: Vec<DecisionTree>,
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Prediction {
    pub class_probabilities: Vec<Real>,
    pub predicted: LabelClass,
}

fn argmax_class(probabilities: &[Real]) -> LabelClass {
    let mut best = 0;
    for (i, &p) in probabilities.iter().enumerate().skip(1) {
        if p > probabilities[best] {
            best = i;
        }
    }
    LabelClass::ORDER[best]
}

fn prediction_from(probabilities: Vec<Real>) -> Prediction {
    let predicted = argmax_class(&probabilities);
    Prediction {
        class_probabilities: probabilities,
        predicted,
    }
}

/// The bootstrap row indices tree `t` trains on: n draws with replacement
/// from its dedicated stream. Public so out-of-bag evaluation can replay
/// membership without storing it in the model.
pub fn bootstrap_indices(seed: u64, tree_index: usize, n: usize) -> Vec<usize> {
    let t = tree_index.to_string();
    let mut rng = stream(seed, &["tree", &t, "bootstrap"]);
    (0..n).map(|_| rng.gen_range(0..n)).collect()
}

fn check_matrix(x: &[Vec<Real>], y: &[LabelClass], d: usize) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::FeatureArity {
            got: x.len(),
            expected: y.len(),
        });
    }
    for row in x {
        if row.len() != d {
            return Err(Error::FeatureArity {
                got: row.len(),
                expected: d,
            });
        }
    }
    Ok(())
}

/// Train the forest. Classes absent from `y` are tolerated — they keep
/// zero probability everywhere — and are visible via `empty_classes`.
pub fn train_forest(
    x: &[Vec<Real>],
    y: &[LabelClass],
    feature_names: &[String],
    params: &ForestParams,
    seed: u64,
) -> Result<ForestModel> {
    if x.is_empty() {
        return Err(Error::TooFewRows(0, 1));
    }
    let d = feature_names.len();
    check_matrix(x, y, d)?;

    let n = x.len();
    let k = LabelClass::ORDER.len();
    let yi: Vec<usize> = y.iter().map(|c| c.index()).collect();
    let mut class_counts = vec![0u32; k];
    for &c in &yi {
        class_counts[c] += 1;
    }

    let features_per_split = ((d as Real).sqrt().floor() as usize).max(1);
    let growth = GrowthParams {
        min_samples_split: params.min_samples_split,
        features_per_split,
        n_classes: k,
    };

    let trees: Vec<DecisionTree> = (0..params.n_trees)
        .into_par_iter()
        .map(|t| {
            let sample = bootstrap_indices(seed, t, n);
            let mut rng = stream(seed, &["tree", &t.to_string(), "growth"]);
            grow_tree(x, &yi, sample, &growth, &mut rng)
        })
        .collect();

    Ok(ForestModel {
        format_version: 1,
        class_order: LabelClass::ORDER.iter().map(|c| c.to_string()).collect(),
        feature_names: feature_names.to_vec(),
        n_trees: params.n_trees,
        min_samples_split: params.min_samples_split,
        features_per_split,
        seed,
        stratified: true,
        class_counts,
        trees,
    })
}

impl ForestModel {
    pub fn n_classes(&self) -> usize {
        self.class_order.len()
    }

    /// Classes that never appeared in training data.
    pub fn empty_classes(&self) -> Vec<LabelClass> {
        LabelClass::ORDER
            .iter()
            .zip(&self.class_counts)
            .filter(|&(_, &c)| c == 0)
            .map(|(&cls, _)| cls)
            .collect()
    }

    /// Mean of per-tree leaf class proportions, summed in tree order.
    pub fn predict_probabilities(&self, row: &[Real]) -> Vec<Real> {
        let k = self.n_classes();
        let mut acc = vec![0.0; k];
        for tree in &self.trees {
            let p = tree.leaf_proportions(row, k);
            for (a, v) in acc.iter_mut().zip(p) {
                *a += v;
            }
        }
        let n = self.trees.len() as Real;
        for a in &mut acc {
            *a /= n;
        }
        acc
    }

    pub fn predict(&self, row: &[Real]) -> Result<Prediction> {
        if row.len() != self.feature_names.len() {
            return Err(Error::FeatureArity {
                got: row.len(),
                expected: self.feature_names.len(),
            });
        }
        Ok(prediction_from(self.predict_probabilities(row)))
    }

    /// Predict every row; parallel across rows, output in row order.
    pub fn predict_matrix(&self, x: &[Vec<Real>]) -> Result<Vec<Prediction>> {
        check_matrix(x, &vec![LabelClass::Balanced; x.len()], self.feature_names.len())?;
        Ok(x.par_iter()
            .map(|row| prediction_from(self.predict_probabilities(row)))
            .collect())
    }

    pub fn save(&self, path: &Path, config: &RunConfig) -> Result<()> {
        crate::config::write_json_artifact(path, config, self)
    }

    pub fn load(path: &Path) -> Result<(ForestModel, Provenance)> {
        #[derive(Deserialize)]
        struct Envelope {
            provenance: Provenance,
            #[serde(flatten)]
            model: ForestModel,
        }
        let text = std::fs::read_to_string(path)
            .map_err(|_| Error::MissingFile(path.display().to_string()))?;
        let env: Envelope = serde_json::from_str(&text)?;
        let expected: Vec<String> = LabelClass::ORDER.iter().map(|c| c.to_string()).collect();
        if env.model.class_order != expected {
            return Err(Error::SchemaMismatch {
                file: path.display().to_string(),
                detail: format!("unexpected class order {:?}", env.model.class_order),
            });
        }
        if !env.model.trees.iter().all(|t| t.is_well_formed()) {
            return Err(Error::SchemaMismatch {
                file: path.display().to_string(),
                detail: "malformed tree nodes".into(),
            });
        }
        Ok((env.model, env.provenance))
    }
}

/// Out-of-bag accuracy: each row is scored only by trees whose bootstrap
/// missed it (membership replayed from the seed). Rows in every bag are
/// skipped.
pub fn oob_accuracy(model: &ForestModel, x: &[Vec<Real>], y: &[LabelClass]) -> Real {
    let n = x.len();
    let k = model.n_classes();
    let in_bag: Vec<Vec<bool>> = (0..model.trees.len())
        .into_par_iter()
        .map(|t| {
            let mut flags = vec![false; n];
            for i in bootstrap_indices(model.seed, t, n) {
                flags[i] = true;
            }
            flags
        })
        .collect();

    let mut correct = 0usize;
    let mut scored = 0usize;
    for (i, (row, &label)) in x.iter().zip(y).enumerate() {
        let mut acc = vec![0.0; k];
        let mut trees_used = 0usize;
        for (tree, bag) in model.trees.iter().zip(&in_bag) {
            if !bag[i] {
                let p = tree.leaf_proportions(row, k);
                for (a, v) in acc.iter_mut().zip(p) {
                    *a += v;
                }
                trees_used += 1;
            }
        }
        if trees_used == 0 {
            continue;
        }
        scored += 1;
        if argmax_class(&acc) == label {
            correct += 1;
        }
    }
    if scored == 0 {
        0.0
    } else {
        correct as Real / scored as Real
    }
}

/// Predictions that sample a class from the training prior, one-hot.
pub fn baseline_stratified(
    train_labels: &[LabelClass],
    test_n: usize,
    seed: u64,
) -> Vec<Prediction> {
    let k = LabelClass::ORDER.len();
    let mut counts = vec![0usize; k];
    for c in train_labels {
        counts[c.index()] += 1;
    }
    let total = train_labels.len().max(1) as Real;
    let cumulative: Vec<Real> = counts
        .iter()
        .scan(0.0, |acc, &c| {
            *acc += c as Real / total;
            Some(*acc)
        })
        .collect();

    let mut rng = stream(seed, &["baseline", "stratified"]);
    (0..test_n)
        .map(|_| {
            let u: Real = rng.gen();
            let class = cumulative.iter().position(|&c| u < c).unwrap_or(k - 1);
            let mut p = vec![0.0; k];
            p[class] = 1.0;
            prediction_from(p)
        })
        .collect()
}

/// Predictions that always say Balanced, one-hot.
pub fn baseline_balanced(test_n: usize) -> Vec<Prediction> {
    (0..test_n)
        .map(|_| {
            let mut p = vec![0.0; LabelClass::ORDER.len()];
            p[LabelClass::Balanced.index()] = 1.0;
            prediction_from(p)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSplit {
    pub train_indices: Vec<usize>,
    pub test_indices: Vec<usize>,
    pub seed: u64,
    pub fractions: (Real, Real),
}

const TEST_FRACTION: Real = 0.2;
const MIN_SPLIT_ROWS: usize = 10;

/// Stratified 80/20 split: each class is shuffled on its own stream and
/// cut as close to 20% as rounding allows (within one row).
pub fn split_dataset(labels: &[LabelClass], seed: u64) -> Result<DatasetSplit> {
    let n = labels.len();
    if n < MIN_SPLIT_ROWS {
        return Err(Error::TooFewRows(n, MIN_SPLIT_ROWS));
    }
    let mut train = Vec::new();
    let mut test = Vec::new();
    for class in LabelClass::ORDER {
        let group: Vec<usize> = (0..n).filter(|&i| labels[i] == class).collect();
        if group.is_empty() {
            continue;
        }
        let order = shuffle_indices(seed, &["split", class.as_str()], group.len());
        let test_count = (group.len() as Real * TEST_FRACTION).round() as usize;
        for (rank, &g) in order.iter().enumerate() {
            if rank < test_count {
                test.push(group[g]);
            } else {
                train.push(group[g]);
            }
        }
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok(DatasetSplit {
        train_indices: train,
        test_indices: test,
        seed,
        fractions: (1.0 - TEST_FRACTION, TEST_FRACTION),
    })
}

/// Plain seeded 80/20 split without class stratification.
pub fn split_dataset_unstratified(n: usize, seed: u64) -> Result<DatasetSplit> {
    if n < MIN_SPLIT_ROWS {
        return Err(Error::TooFewRows(n, MIN_SPLIT_ROWS));
    }
    let order = shuffle_indices(seed, &["split", "all"], n);
    let test_count = (n as Real * TEST_FRACTION).round() as usize;
    let mut test: Vec<usize> = order[..test_count].to_vec();
    let mut train: Vec<usize> = order[test_count..].to_vec();
    train.sort_unstable();
    test.sort_unstable();
    Ok(DatasetSplit {
        train_indices: train,
        test_indices: test,
        seed,
        fractions: (1.0 - TEST_FRACTION, TEST_FRACTION),
    })
}

/// The grid the tuner sweeps by default.
pub fn default_grid() -> Vec<ForestParams> {
    let mut grid = Vec::new();
    for &n_trees in &[100, 300, 500] {
        for &min_samples_split in &[2, 8, 16] {
            grid.push(ForestParams {
                n_trees,
                min_samples_split,
            });
        }
    }
    grid
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CvCell {
    pub params: ForestParams,
    pub mean_macro_auc: Real,
    pub fold_scores: Vec<Real>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CvReport {
    pub folds: usize,
    pub seed: u64,
    pub cells: Vec<CvCell>,
    pub best: ForestParams,
}

/// 10-fold stratified cross-validation over a parameter grid, scored by
/// mean macro one-vs-rest ROC-AUC; first grid entry wins ties.
pub fn tune_cv(
    x: &[Vec<Real>],
    y: &[LabelClass],
    feature_names: &[String],
    grid: &[ForestParams],
    seed: u64,
) -> Result<CvReport> {
    const FOLDS: usize = 10;
    let n = y.len();
    if n < FOLDS {
        return Err(Error::TooFewRows(n, FOLDS));
    }

    // round-robin fold assignment within each shuffled class
    let mut fold_of = vec![0usize; n];
    for class in LabelClass::ORDER {
        let group: Vec<usize> = (0..n).filter(|&i| y[i] == class).collect();
        let order = shuffle_indices(seed, &["cv", class.as_str()], group.len());
        for (rank, &g) in order.iter().enumerate() {
            fold_of[group[g]] = rank % FOLDS;
        }
    }

    let mut cells = Vec::new();
    for params in grid {
        let mut fold_scores = Vec::with_capacity(FOLDS);
        for fold in 0..FOLDS {
            let train_idx: Vec<usize> = (0..n).filter(|&i| fold_of[i] != fold).collect();
            let test_idx: Vec<usize> = (0..n).filter(|&i| fold_of[i] == fold).collect();
            let tx: Vec<Vec<Real>> = train_idx.iter().map(|&i| x[i].clone()).collect();
            let ty: Vec<LabelClass> = train_idx.iter().map(|&i| y[i]).collect();
            let vx: Vec<Vec<Real>> = test_idx.iter().map(|&i| x[i].clone()).collect();
            let vy: Vec<LabelClass> = test_idx.iter().map(|&i| y[i]).collect();
            let fold_seed = derive_seed(seed, &["cv", "fold", &fold.to_string()]);
            let model = train_forest(&tx, &ty, feature_names, params, fold_seed)?;
            let preds = model.predict_matrix(&vx)?;
            fold_scores.push(crate::eval::macro_ovr_auc(&preds, &vy)?);
        }
        let mean = fold_scores.iter().sum::<Real>() / FOLDS as Real;
        cells.push(CvCell {
            params: *params,
            mean_macro_auc: mean,
            fold_scores,
        });
    }
    let best = cells
        .iter()
        .fold(None::<&CvCell>, |best, cell| match best {
            Some(b) if cell.mean_macro_auc > b.mean_macro_auc => Some(cell),
            Some(b) => Some(b),
            None => Some(cell),
        })
        .map(|c| c.params)
        .expect("non-empty grid");
    Ok(CvReport {
        folds: FOLDS,
        seed,
        cells,
        best,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::labeling::LabelClass::*;

    fn names(d: usize) -> Vec<String> {
        (0..d).map(|i| format!("f{i}")).collect()
    }

    fn separable(n: usize) -> (Vec<Vec<Real>>, Vec<LabelClass>) {
        let x: Vec<Vec<Real>> = (0..n)
            .map(|i| vec![i as Real - (n / 2) as Real, ((i * 31) % 17) as Real])
            .collect();
        let y = x
            .iter()
            .map(|r| if r[0] > 0.0 { Permissive } else { Balanced })
            .collect();
        (x, y)
    }

    #[test]
    fn separable_data_reaches_perfect_training_accuracy() {
        let (x, y) = separable(200);
        let params = ForestParams {
            n_trees: 30,
            min_samples_split: 2,
        };
        let model = train_forest(&x, &y, &names(2), &params, 5).unwrap();
        let preds = model.predict_matrix(&x).unwrap();
        let correct = preds
            .iter()
            .zip(&y)
            .filter(|(p, &t)| p.predicted == t)
            .count();
        assert_eq!(correct, 200);
    }

    #[test]
    fn probabilities_sum_to_one() {
        let (x, y) = separable(80);
        let model = train_forest(
            &x,
            &y,
            &names(2),
            &ForestParams {
                n_trees: 20,
                min_samples_split: 4,
            },
            7,
        )
        .unwrap();
        for row in &x {
            let p = model.predict_probabilities(row);
            assert!((p.iter().sum::<Real>() - 1.0).abs() < 1e-12);
            assert!(p.iter().all(|&v| (0.0..=1.0).contains(&v)));
        }
    }

    #[test]
    fn tie_breaks_follow_class_order() {
        assert_eq!(argmax_class(&[0.5, 0.5, 0.0, 0.0]), Balanced);
        assert_eq!(argmax_class(&[0.1, 0.4, 0.4, 0.1]), Permissive);
        assert_eq!(argmax_class(&[0.0, 0.0, 0.0, 1.0]), Unspecialized);
    }

    #[test]
    fn training_is_deterministic_across_thread_pools() {
        let (x, y) = separable(120);
        let params = ForestParams {
            n_trees: 40,
            min_samples_split: 4,
        };
        let a = train_forest(&x, &y, &names(2), &params, 11).unwrap();
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let b = pool.install(|| train_forest(&x, &y, &names(2), &params, 11).unwrap());
        assert_eq!(a, b);
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }

    #[test]
    fn empty_classes_are_reported() {
        let (x, y) = separable(40);
        let model = train_forest(
            &x,
            &y,
            &names(2),
            &ForestParams {
                n_trees: 5,
                min_samples_split: 8,
            },
            3,
        )
        .unwrap();
        assert_eq!(model.empty_classes(), vec![Restrictive, Unspecialized]);
    }

    #[test]
    fn model_json_round_trips_identically() {
        let (x, y) = separable(60);
        let model = train_forest(
            &x,
            &y,
            &names(2),
            &ForestParams {
                n_trees: 10,
                min_samples_split: 4,
            },
            13,
        )
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");
        let config = RunConfig::default();
        model.save(&path, &config).unwrap();
        let (loaded, prov) = ForestModel::load(&path).unwrap();
        assert_eq!(model, loaded);
        assert_eq!(prov.config_hash, config.content_hash());
    }

    #[test]
    fn stratified_split_is_within_one_row_per_class() {
        let mut labels = Vec::new();
        labels.extend(std::iter::repeat(Balanced).take(25));
        labels.extend(std::iter::repeat(Permissive).take(25));
        labels.extend(std::iter::repeat(Restrictive).take(25));
        labels.extend(std::iter::repeat(Unspecialized).take(25));
        let split = split_dataset(&labels, 42).unwrap();
        assert_eq!(split.test_indices.len(), 20);
        assert_eq!(split.train_indices.len(), 80);
        for class in LabelClass::ORDER {
            let in_test = split
                .test_indices
                .iter()
                .filter(|&&i| labels[i] == class)
                .count();
            assert_eq!(in_test, 5);
        }
        // disjoint and covering
        let mut all: Vec<usize> = split
            .train_indices
            .iter()
            .chain(&split.test_indices)
            .copied()
            .collect();
        all.sort_unstable();
        assert_eq!(all, (0..100).collect::<Vec<_>>());
        assert_eq!(split, split_dataset(&labels, 42).unwrap());
    }

    #[test]
    fn too_few_rows_is_rejected() {
        let labels = vec![Balanced; 5];
        assert!(matches!(
            split_dataset(&labels, 1),
            Err(Error::TooFewRows(5, 10))
        ));
    }

    #[test]
    fn stratified_baseline_tracks_the_prior() {
        // prior ~ (0.542, 0.293, 0.067, 0.098)
        let mut train = Vec::new();
        train.extend(std::iter::repeat(Balanced).take(542));
        train.extend(std::iter::repeat(Permissive).take(293));
        train.extend(std::iter::repeat(Restrictive).take(67));
        train.extend(std::iter::repeat(Unspecialized).take(98));
        let preds = baseline_stratified(&train, 10_000, 21);
        let mut shares = [0.0 as Real; 4];
        for p in &preds {
            shares[p.predicted.index()] += 1.0 / 10_000.0;
        }
        assert!((shares[0] - 0.542).abs() < 0.02);
        assert!((shares[1] - 0.293).abs() < 0.02);
        assert!((shares[2] - 0.067).abs() < 0.02);
        assert!((shares[3] - 0.098).abs() < 0.02);
    }

    #[test]
    fn balanced_baseline_is_constant_one_hot() {
        let preds = baseline_balanced(3);
        assert_eq!(preds.len(), 3);
        for p in preds {
            assert_eq!(p.predicted, Balanced);
            assert_eq!(p.class_probabilities, vec![1.0, 0.0, 0.0, 0.0]);
        }
    }

    #[test]
    fn chance_level_oob_accuracy_on_noise() {
        // four equal classes, pure-noise features: accuracy should hover
        // around 0.25
        let mut total = 0.0;
        for seed in 0..10u64 {
            let mut rng = stream(seed, &["test", "oob"]);
            let x: Vec<Vec<Real>> = (0..400)
                .map(|_| vec![rng.gen::<Real>(), rng.gen::<Real>()])
                .collect();
            let y: Vec<LabelClass> = (0..400).map(|i| LabelClass::ORDER[i % 4]).collect();
            let model = train_forest(
                &x,
                &y,
                &names(2),
                &ForestParams {
                    n_trees: 150,
                    min_samples_split: 8,
                },
                seed,
            )
            .unwrap();
            total += oob_accuracy(&model, &x, &y);
        }
        let mean = total / 10.0;
        assert!((mean - 0.25).abs() <= 0.07, "mean OOB accuracy {mean}");
    }
}
