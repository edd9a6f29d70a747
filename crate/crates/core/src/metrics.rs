//! Binary-classification metrics: ROC sweeps, AUROC, and thresholds that
//! respect a false-positive-rate budget.
//!
//! Two score orientations appear in the pipeline and both are explicit here:
//! [`compute_roc`] takes *anomaly* scores (higher = more likely a deviation,
//! i.e. the negated model log-likelihood), while [`threshold_at_fpr`] works
//! in raw log-likelihood units to match the classifier's threshold rule.

use alloc::vec::Vec;

use crate::{Error, Result};

/// One operating point of a ROC sweep. A sample is predicted positive when
/// its anomaly score is `>= threshold`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RocPoint {
    pub fpr: f64,
    pub tpr: f64,
    pub threshold: f64,
}

/// ROC curve with its area.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RocCurve {
    pub points: Vec<RocPoint>,
    pub auroc: f64,
}

/// Sweep thresholds over the unique anomaly scores and integrate the ROC by
/// the trapezoid rule. Tied scores enter an operating point together, which
/// makes the area equal to the concordant-pair count with ties worth 1/2.
///
/// `labels[i] == true` marks a positive (deviation) sample. Errors if either
/// class is absent.
pub fn compute_roc(scores: &[f64], labels: &[bool]) -> Result<RocCurve> {
    if scores.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: scores.len(),
            actual: labels.len(),
        });
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::invalid("scores contain NaN"));
    }
    let n_pos = labels.iter().filter(|&&l| l).count();
    let n_neg = labels.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::invalid("both classes must be present"));
    }

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));

    let mut points = Vec::with_capacity(order.len() + 1);
    points.push(RocPoint {
        fpr: 0.0,
        tpr: 0.0,
        threshold: f64::INFINITY,
    });

    let (mut tp, mut fp) = (0usize, 0usize);
    let mut auroc = 0.0;
    let mut i = 0;
    while i < order.len() {
        let threshold = scores[order[i]];
        let mut j = i;
        while j < order.len() && scores[order[j]] == threshold {
            if labels[order[j]] {
                tp += 1;
            } else {
                fp += 1;
            }
            j += 1;
        }
        let prev = *points.last().unwrap();
        let point = RocPoint {
            fpr: fp as f64 / n_neg as f64,
            tpr: tp as f64 / n_pos as f64,
            threshold,
        };
        auroc += (point.fpr - prev.fpr) * (point.tpr + prev.tpr) * 0.5;
        points.push(point);
        i = j;
    }

    Ok(RocCurve { points, auroc })
}

/// Largest threshold (in log-likelihood units, where a score *below* the
/// threshold is classified as a deviation) whose empirical false-positive
/// rate on the given planar scores stays strictly below `max_fpr`.
///
/// The supremum is always attained at an observed score: with `m` the
/// largest count satisfying `m / n < max_fpr`, the answer is the `m`-th
/// order statistic. A boundary score classifies as planar, so the all-equal
/// case yields that value with FPR 0.
pub fn threshold_at_fpr(negative_scores: &[f64], max_fpr: f64) -> Result<f64> {
    if negative_scores.is_empty() {
        return Err(Error::invalid("no negative scores"));
    }
    if !(max_fpr > 0.0 && max_fpr < 1.0) {
        return Err(Error::invalid("max_fpr must lie in (0, 1)"));
    }
    if negative_scores.iter().any(|s| s.is_nan()) {
        return Err(Error::invalid("scores contain NaN"));
    }
    let mut sorted = negative_scores.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let m = (crate::math::ceil(n * max_fpr) as usize).saturating_sub(1);
    Ok(sorted[m])
}

/// Empirical FPR of a log-likelihood threshold on planar scores.
pub fn fpr_at_threshold(negative_scores: &[f64], threshold: f64) -> f64 {
    if negative_scores.is_empty() {
        return 0.0;
    }
    let below = negative_scores.iter().filter(|&&s| s < threshold).count();
    below as f64 / negative_scores.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;
    use rand::seq::SliceRandom;
    use rand::Rng;

    /// Concordant-pair oracle: P(score_pos > score_neg) with ties as 1/2.
    fn pair_count_auroc(scores: &[f64], labels: &[bool]) -> f64 {
        let mut concordant = 0.0;
        let mut pairs = 0.0;
        for (i, &li) in labels.iter().enumerate() {
            if !li {
                continue;
            }
            for (j, &lj) in labels.iter().enumerate() {
                if lj {
                    continue;
                }
                pairs += 1.0;
                if scores[i] > scores[j] {
                    concordant += 1.0;
                } else if scores[i] == scores[j] {
                    concordant += 0.5;
                }
            }
        }
        concordant / pairs
    }

    #[test]
    fn perfectly_separated_scores_reach_auroc_one() {
        let scores = vec![0.9, 0.8, 0.2, 0.1];
        let labels = vec![true, true, false, false];
        let roc = compute_roc(&scores, &labels).unwrap();
        assert!((roc.auroc - 1.0).abs() < 1e-12);
    }

    #[test]
    fn permuted_labels_sit_at_chance_level() {
        let mut rng = crate::rng::rng_for(3, 0);
        let scores: Vec<f64> = (0..10_000).map(|_| rng.gen::<f64>()).collect();
        let mut labels: Vec<bool> = (0..10_000).map(|i| i % 2 == 0).collect();
        labels.shuffle(&mut rng);
        let roc = compute_roc(&scores, &labels).unwrap();
        assert!((roc.auroc - 0.5).abs() < 0.02, "auroc {}", roc.auroc);
    }

    #[test]
    fn hand_listed_pairs_match_pair_count_oracle() {
        let scores = vec![
            0.1, 0.4, 0.35, 0.8, 0.8, 0.8, 0.05, 0.4, 0.6, 0.33, 0.21, 0.9, 0.15, 0.44, 0.44,
            0.02, 0.71, 0.5, 0.5, 0.12,
        ];
        let labels = vec![
            false, false, true, true, false, true, false, true, true, false, false, true, false,
            true, false, false, true, true, false, true,
        ];
        let roc = compute_roc(&scores, &labels).unwrap();
        assert!((roc.auroc - pair_count_auroc(&scores, &labels)).abs() < 1e-9);
    }

    #[test]
    fn all_tied_scores_give_half() {
        let scores = vec![1.0; 10];
        let labels: Vec<bool> = (0..10).map(|i| i < 4).collect();
        let roc = compute_roc(&scores, &labels).unwrap();
        assert!((roc.auroc - 0.5).abs() < 1e-12);
    }

    #[test]
    fn single_class_is_rejected() {
        assert!(compute_roc(&[0.1, 0.2], &[true, true]).is_err());
        assert!(compute_roc(&[0.1, 0.2], &[false, false]).is_err());
    }

    #[test]
    fn roc_is_monotone_in_both_coordinates() {
        let mut rng = crate::rng::rng_for(4, 0);
        let scores: Vec<f64> = (0..500).map(|_| (rng.gen::<f64>() * 8.0).round()).collect();
        let labels: Vec<bool> = scores.iter().map(|&s| rng.gen::<f64>() < s / 8.0).collect();
        if let Ok(roc) = compute_roc(&scores, &labels) {
            for w in roc.points.windows(2) {
                assert!(w[1].fpr >= w[0].fpr);
                assert!(w[1].tpr >= w[0].tpr);
            }
        }
    }

    #[test]
    fn auroc_invariant_under_increasing_transforms() {
        let mut rng = crate::rng::rng_for(5, 0);
        let scores: Vec<f64> = (0..200).map(|_| rng.gen::<f64>() * 4.0 - 2.0).collect();
        let labels: Vec<bool> = (0..200).map(|_| rng.gen()).collect();
        let base = compute_roc(&scores, &labels).unwrap().auroc;
        let affine: Vec<f64> = scores.iter().map(|s| 3.0 * s + 11.0).collect();
        let cubic: Vec<f64> = scores.iter().map(|s| s * s * s).collect();
        assert!((compute_roc(&affine, &labels).unwrap().auroc - base).abs() < 1e-12);
        assert!((compute_roc(&cubic, &labels).unwrap().auroc - base).abs() < 1e-12);
    }

    /// Exhaustive-scan oracle over every candidate threshold.
    fn threshold_oracle(negatives: &[f64], max_fpr: f64) -> f64 {
        let mut best = f64::NEG_INFINITY;
        for &candidate in negatives {
            let fpr = fpr_at_threshold(negatives, candidate);
            if fpr < max_fpr && candidate > best {
                best = candidate;
            }
        }
        best
    }

    #[test]
    fn hundred_negatives_at_five_percent() {
        let negatives: Vec<f64> = (0..100).map(|i| i as f64).collect();
        let t = threshold_at_fpr(&negatives, 0.05).unwrap();
        let below = negatives.iter().filter(|&&s| s < t).count();
        assert!(below <= 4, "{below} negatives below threshold {t}");
        assert_eq!(t, 4.0);
    }

    #[test]
    fn identical_negatives_yield_zero_fpr() {
        let negatives = vec![-3.5; 40];
        let t = threshold_at_fpr(&negatives, 0.05).unwrap();
        assert_eq!(t, -3.5);
        assert_eq!(fpr_at_threshold(&negatives, t), 0.0);
    }

    proptest! {
        #[test]
        fn threshold_matches_exhaustive_scan(
            scores in proptest::collection::vec(-50.0f64..50.0, 1..120),
            max_fpr in 0.01f64..0.5,
        ) {
            let t = threshold_at_fpr(&scores, max_fpr).unwrap();
            prop_assert_eq!(t, threshold_oracle(&scores, max_fpr));
            prop_assert!(fpr_at_threshold(&scores, t) < max_fpr);
        }

        #[test]
        fn sweep_equals_pair_counting(
            scores in proptest::collection::vec(0i32..12, 8..200),
        ) {
            let scores: Vec<f64> = scores.iter().map(|&s| s as f64 / 3.0).collect();
            let labels: Vec<bool> = scores.iter().enumerate()
                .map(|(i, &s)| (i * 7 + s as usize) % 3 == 0).collect();
            prop_assume!(labels.iter().any(|&l| l) && labels.iter().any(|&l| !l));
            let roc = compute_roc(&scores, &labels).unwrap();
            prop_assert!((roc.auroc - pair_count_auroc(&scores, &labels)).abs() < 1e-9);
        }
    }
}
