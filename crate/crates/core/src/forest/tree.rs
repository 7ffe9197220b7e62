//! Single CART decision tree with Gini impurity.
//!
//! Trees grow until nodes are pure or smaller than the split minimum, with
//! no depth cap. At each node a fixed-size random subset of features is
//! considered; candidate thresholds are midpoints between consecutive
//! distinct sorted values, and a sample routes left when its value is less
//! than or equal to the threshold. Growth is depth-first (left before
//! right) so the RNG consumption order — and therefore the tree — is fully
//! determined by the input and the provided stream.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::Real;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TreeNode {
    Split {
        feature: u32,
        threshold: Real,
        left: u32,
        right: u32,
    },
    Leaf {
        counts: Vec<u32>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    /// Arena of nodes; the root is index 0.
    pub nodes: Vec<TreeNode>,
}

/// Gini impurity of a node with the given class counts.
pub fn gini(counts: &[u32]) -> Real {
    let n: u32 = counts.iter().sum();
    if n == 0 {
        return 0.0;
    }
    let n = n as Real;
    1.0 - counts
        .iter()
        .map(|&c| {
            let p = c as Real / n;
            p * p
        })
        .sum::<Real>()
}

pub struct GrowthParams {
    pub min_samples_split: usize,
    pub features_per_split: usize,
    pub n_classes: usize,
}

struct BestSplit {
    feature: u32,
    threshold: Real,
    decrease: Real,
}

fn class_counts(y: &[usize], sample: &[usize], n_classes: usize) -> Vec<u32> {
    let mut counts = vec![0u32; n_classes];
    for &i in sample {
        counts[y[i]] += 1;
    }
    counts
}

/// Find the best (feature, threshold) among a drawn feature subset, or
/// `None` when every candidate feature is constant on this node. Features
/// are scanned in drawn order and thresholds ascending, with strictly
/// better impurity decrease required to displace the incumbent, so the
/// choice is deterministic.
fn best_split(
    x: &[Vec<Real>],
    y: &[usize],
    sample: &[usize],
    parent_counts: &[u32],
    params: &GrowthParams,
    rng: &mut ChaCha8Rng,
) -> Option<BestSplit> {
    let d = x[0].len();
    let m = params.features_per_split.min(d);
    let mut features: Vec<u32> = (0..d as u32).collect();
    for i in 0..m {
        let j = rng.gen_range(i..d);
        features.swap(i, j);
    }

    let n = sample.len();
    let n_real = n as Real;
    let parent_gini = gini(parent_counts);
    let mut best: Option<BestSplit> = None;

    let mut pairs: Vec<(Real, usize)> = Vec::with_capacity(n);
    for &f in &features[..m] {
        pairs.clear();
        pairs.extend(sample.iter().map(|&i| (x[i][f as usize], y[i])));
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite feature values"));

        let mut left = vec![0u32; params.n_classes];
        let mut right = parent_counts.to_vec();
        for i in 0..n - 1 {
            left[pairs[i].1] += 1;
            right[pairs[i].1] -= 1;
            let (a, b) = (pairs[i].0, pairs[i + 1].0);
            if a < b {
                // midpoint, falling back to the lower value when rounding
                // would let equal-to-b samples leak left
                let mut t = a + (b - a) / 2.0;
                if t >= b {
                    t = a;
                }
                let nl = (i + 1) as Real;
                let nr = (n - i - 1) as Real;
                let weighted = (nl * gini(&left) + nr * gini(&right)) / n_real;
                let decrease = parent_gini - weighted;
                if best.as_ref().map_or(true, |s| decrease > s.decrease) {
                    best = Some(BestSplit {
                        feature: f,
                        threshold: t,
                        decrease,
                    });
                }
            }
        }
    }
    best.filter(|s| s.decrease > 0.0)
}

/// Grow one tree on the bootstrap `sample` (indices into `x`/`y`, repeats
/// allowed). `y` holds class indices < `n_classes`.
pub fn grow_tree(
    x: &[Vec<Real>],
    y: &[usize],
    sample: Vec<usize>,
    params: &GrowthParams,
    rng: &mut ChaCha8Rng,
) -> DecisionTree {
    let mut nodes = Vec::new();
    nodes.push(TreeNode::Leaf { counts: Vec::new() }); // root placeholder
    // LIFO with right pushed first keeps growth depth-first, left-first
    let mut stack: Vec<(Vec<usize>, usize)> = vec![(sample, 0)];

    while let Some((sample, slot)) = stack.pop() {
        let counts = class_counts(y, &sample, params.n_classes);
        let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;

        let split = if pure || sample.len() < params.min_samples_split {
            None
        } else {
            best_split(x, y, &sample, &counts, params, rng)
        };

        match split {
            None => nodes[slot] = TreeNode::Leaf { counts },
            Some(s) => {
                let (left_sample, right_sample): (Vec<usize>, Vec<usize>) = sample
                    .into_iter()
                    .partition(|&i| x[i][s.feature as usize] <= s.threshold);
                let left_slot = nodes.len();
                nodes.push(TreeNode::Leaf { counts: Vec::new() });
                let right_slot = nodes.len();
                nodes.push(TreeNode::Leaf { counts: Vec::new() });
                nodes[slot] = TreeNode::Split {
                    feature: s.feature,
                    threshold: s.threshold,
                    left: left_slot as u32,
                    right: right_slot as u32,
                };
                stack.push((right_sample, right_slot));
                stack.push((left_sample, left_slot));
            }
        }
    }
    DecisionTree { nodes }
}

impl DecisionTree {
    /// Class proportions of the leaf this row falls into.
    pub fn leaf_proportions(&self, row: &[Real], n_classes: usize) -> Vec<Real> {
        let mut idx = 0usize;
        loop {
            match &self.nodes[idx] {
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    idx = if row[*feature as usize] <= *threshold {
                        *left as usize
                    } else {
                        *right as usize
                    };
                }
                TreeNode::Leaf { counts } => {
                    let total: u32 = counts.iter().sum();
                    let mut p = vec![0.0; n_classes];
                    if total > 0 {
                        for (pi, &c) in p.iter_mut().zip(counts) {
                            *pi = c as Real / total as Real;
                        }
                    }
                    return p;
                }
            }
        }
    }

    /// Structural sanity: children in range, leaves non-empty.
    pub fn is_well_formed(&self) -> bool {
        self.nodes.iter().all(|n| match n {
            TreeNode::Split { left, right, .. } => {
                (*left as usize) < self.nodes.len() && (*right as usize) < self.nodes.len()
            }
            TreeNode::Leaf { counts } => counts.iter().sum::<u32>() > 0,
        })
    }

    pub fn splits_on(&self, feature: u32) -> bool {
        self.nodes
            .iter()
            .any(|n| matches!(n, TreeNode::Split { feature: f, .. } if *f == feature))
    }
}
