//! Cross-checks ROC-AUC against a brute-force pair-counting oracle.
//!
//! The library computes AUC from midranks in one sort. The oracle here is
//! the probabilistic definition: over every (positive, negative) pair,
//! score a win 1, a tie 1/2, a loss 0, and average. The two must agree to
//! 1e-9 on score sets full of deliberate ties.

use depstrat_core::eval::{binary_auc, macro_ovr_auc, per_class_auc};
use depstrat_core::forest::Prediction;
use depstrat_core::labeling::LabelClass;
use depstrat_core::rng::stream;
use depstrat_core::Real;
use rand::Rng;

const TOLERANCE: Real = 1e-9;

/// Average pairwise win rate of positives over negatives; `None` if either
/// side is empty.
fn pair_counting_auc(scores: &[Real], positive: &[bool]) -> Option<Real> {
    let pos: Vec<Real> = scores
        .iter()
        .zip(positive)
        .filter(|(_, &p)| p)
        .map(|(&s, _)| s)
        .collect();
    let neg: Vec<Real> = scores
        .iter()
        .zip(positive)
        .filter(|(_, &p)| !p)
        .map(|(&s, _)| s)
        .collect();
    if pos.is_empty() || neg.is_empty() {
        return None;
    }
    let mut total = 0.0;
    for &p in &pos {
        for &n in &neg {
            if p > n {
                total += 1.0;
            } else if p == n {
                total += 0.5;
            }
        }
    }
    Some(total / (pos.len() as Real * neg.len() as Real))
}

/// Scores drawn from a small lattice so exact ties are frequent.
fn tied_scores(rng: &mut impl Rng, n: usize, levels: u32) -> Vec<Real> {
    (0..n)
        .map(|_| rng.gen_range(0..levels) as Real / levels as Real)
        .collect()
}

#[test]
fn midrank_auc_matches_pair_counting_on_tied_data() {
    let mut rng = stream(55_001, &["oracle", "auc"]);
    let mut compared = 0;
    for case in 0..100 {
        let n = rng.gen_range(2..=50);
        let levels = [2, 3, 5, 25][case % 4];
        let scores = tied_scores(&mut rng, n, levels);
        let positive: Vec<bool> = (0..n).map(|_| rng.gen_range(0..2) == 0).collect();
        let fast = binary_auc(&scores, &positive);
        let slow = pair_counting_auc(&scores, &positive);
        match (fast, slow) {
            (Some(a), Some(b)) => {
                assert!(
                    (a - b).abs() <= TOLERANCE,
                    "case {case}: midrank {a} vs pairs {b}\nscores {scores:?}\npositive {positive:?}"
                );
                compared += 1;
            }
            (None, None) => {}
            (f, s) => panic!("case {case}: definedness disagrees: {f:?} vs {s:?}"),
        }
    }
    assert!(compared >= 80, "only {compared} defined cases");
}

#[test]
fn extreme_tie_patterns_match() {
    // all scores identical -> exactly 1/2
    let scores = vec![0.7; 10];
    let positive: Vec<bool> = (0..10).map(|i| i < 4).collect();
    assert_eq!(binary_auc(&scores, &positive), Some(0.5));
    assert_eq!(pair_counting_auc(&scores, &positive), Some(0.5));

    // two levels, mixed membership on each
    let scores = vec![0.0, 0.0, 0.0, 1.0, 1.0, 1.0];
    let positive = vec![true, false, false, true, true, false];
    let fast = binary_auc(&scores, &positive).unwrap();
    let slow = pair_counting_auc(&scores, &positive).unwrap();
    assert!((fast - slow).abs() <= TOLERANCE);

    // single positive among ties
    let scores = vec![0.5, 0.5, 0.5, 0.5];
    let positive = vec![true, false, false, false];
    assert_eq!(binary_auc(&scores, &positive), Some(0.5));
}

fn random_predictions(rng: &mut impl Rng, n: usize, levels: u32) -> Vec<Prediction> {
    (0..n)
        .map(|_| {
            let mut probs: Vec<Real> = (0..4)
                .map(|_| (rng.gen_range(0..levels) + 1) as Real)
                .collect();
            let total: Real = probs.iter().sum();
            for p in &mut probs {
                *p /= total;
            }
            let predicted = LabelClass::ORDER[rng.gen_range(0..4)];
            Prediction {
                class_probabilities: probs,
                predicted,
            }
        })
        .collect()
}

#[test]
fn macro_ovr_matches_mean_of_pair_counting_classes() {
    let mut rng = stream(55_002, &["oracle", "auc", "macro"]);
    for case in 0..100 {
        let n = rng.gen_range(4..=50);
        let preds = random_predictions(&mut rng, n, [2, 4, 8][case % 3]);
        let truth: Vec<LabelClass> = (0..n)
            .map(|_| LabelClass::ORDER[rng.gen_range(0..4)])
            .collect();

        let mut expected_classes = Vec::new();
        for class in LabelClass::ORDER {
            let scores: Vec<Real> = preds
                .iter()
                .map(|p| p.class_probabilities[class.index()])
                .collect();
            let positive: Vec<bool> = truth.iter().map(|t| *t == class).collect();
            expected_classes.push(pair_counting_auc(&scores, &positive));
        }

        let per_class = per_class_auc(&preds, &truth);
        for (class, (got, want)) in LabelClass::ORDER
            .iter()
            .zip(per_class.iter().zip(&expected_classes))
        {
            match (got, want) {
                (Some(a), Some(b)) => assert!(
                    (a - b).abs() <= TOLERANCE,
                    "case {case}, class {class}: {a} vs {b}"
                ),
                (None, None) => {}
                (g, w) => panic!("case {case}, class {class}: {g:?} vs {w:?}"),
            }
        }

        let defined: Vec<Real> = expected_classes.iter().flatten().copied().collect();
        let fast = macro_ovr_auc(&preds, &truth);
        if defined.is_empty() {
            assert!(fast.is_err(), "case {case}: macro defined with no classes");
        } else {
            let want = defined.iter().sum::<Real>() / defined.len() as Real;
            let got = fast.unwrap();
            assert!(
                (got - want).abs() <= TOLERANCE,
                "case {case}: macro {got} vs {want}"
            );
        }
    }
}
