//! Rank statistics, CAP curves, Monte-Carlo p-values, and thresholded
//! confusion metrics.
//!
//! The Gini index used throughout is the rank statistic `2*AUC - 1`, where
//! AUC is the Mann-Whitney probability that a random Weak student outscores
//! a random Good student (half credit for ties). It is unrelated to the
//! Gini impurity inside decision-tree splits.

use alloc::vec::Vec;
use core::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::dataset::Label;
use crate::math::derive_seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricError {
    /// Ranking statistics need at least one member of each label.
    SingleClassSample,
    /// Monte-Carlo replicate count must be at least 1.
    InvalidNullSamples,
}

impl fmt::Display for MetricError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricError::SingleClassSample => {
                write!(f, "sample contains a single label; rank statistics undefined")
            }
            MetricError::InvalidNullSamples => write!(f, "null replicate count must be >= 1"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for MetricError {}

/// Mann-Whitney AUC with average-rank tie handling, O(n log n).
///
/// Weak is the positive class: AUC 1.0 means every Weak student outscored
/// every Good one.
pub fn auc(scores: &[f64], labels: &[Label]) -> Result<f64, MetricError> {
    debug_assert_eq!(scores.len(), labels.len());
    let n = scores.len();
    let n_weak = labels.iter().filter(|l| l.is_weak()).count();
    let n_good = n - n_weak;
    if n_weak == 0 || n_good == 0 {
        return Err(MetricError::SingleClassSample);
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));

    // Average ranks within tie groups, 1-indexed.
    let mut weak_rank_sum = 0.0f64;
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j < n && scores[order[j]] == scores[order[i]] {
            j += 1;
        }
        let avg_rank = (i + 1 + j) as f64 / 2.0;
        for &idx in &order[i..j] {
            if labels[idx].is_weak() {
                weak_rank_sum += avg_rank;
            }
        }
        i = j;
    }

    let nw = n_weak as f64;
    let u = weak_rank_sum - nw * (nw + 1.0) / 2.0;
    Ok(u / (nw * n_good as f64))
}

/// Gini index: `2*AUC - 1`, in [-1, 1].
pub fn gini(scores: &[f64], labels: &[Label]) -> Result<f64, MetricError> {
    Ok(2.0 * auc(scores, labels)? - 1.0)
}

/// Cumulative accuracy profile: fraction of Weak students captured against
/// fraction of students examined in descending score order.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CapCurve {
    /// `(fraction_of_students, fraction_of_weak_captured)`, starting (0,0)
    /// and ending (1,1), both coordinates non-decreasing.
    pub points: Vec<(f64, f64)>,
}

impl CapCurve {
    /// Area under the curve by the trapezoid rule.
    pub fn area(&self) -> f64 {
        self.points
            .windows(2)
            .map(|w| (w[1].0 - w[0].0) * (w[0].1 + w[1].1) / 2.0)
            .sum()
    }

    /// Smallest examined fraction at which every Weak student is captured.
    pub fn full_capture_fraction(&self) -> f64 {
        self.points
            .iter()
            .find(|p| p.1 >= 1.0)
            .map(|p| p.0)
            .unwrap_or(1.0)
    }
}

/// Build the CAP curve. Score ties are broken by ascending student index so
/// the curve is deterministic.
pub fn cap_curve(scores: &[f64], labels: &[Label]) -> Result<CapCurve, MetricError> {
    debug_assert_eq!(scores.len(), labels.len());
    let n = scores.len();
    let n_weak = labels.iter().filter(|l| l.is_weak()).count();
    if n_weak == 0 || n_weak == n {
        return Err(MetricError::SingleClassSample);
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));

    let mut points = Vec::with_capacity(n + 1);
    points.push((0.0, 0.0));
    let mut captured = 0usize;
    for (i, &idx) in order.iter().enumerate() {
        if labels[idx].is_weak() {
            captured += 1;
        }
        points.push(((i + 1) as f64 / n as f64, captured as f64 / n_weak as f64));
    }
    Ok(CapCurve { points })
}

/// Which observed statistic the null distribution is compared against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum NullMode {
    /// Average Gini over all six test sets (the table's Avg column).
    #[default]
    Average,
    /// Gini on the initial split's test set only (the G column).
    Initial,
}

/// Monte-Carlo p-value with add-one correction, so p is never 0.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PValue {
    pub value: f64,
    pub null_samples: u64,
    pub null_seed: u64,
}

/// A frozen sample of the null statistic, shared by every row of a
/// selection table so that a higher observed average can never receive a
/// larger p-value than a lower one.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NullSample {
    sorted: Vec<f64>,
    seed: u64,
    mode: NullMode,
}

impl NullSample {
    /// Draw `r` null statistics: replicate `i` uses an rng seeded with
    /// `derive_seed(seed, i)`, so replicates can be produced in any order
    /// or in parallel and reassembled with [`NullSample::from_draws`].
    pub fn generate(
        label_sets: &[&[Label]],
        r: u64,
        seed: u64,
        mode: NullMode,
    ) -> Result<Self, MetricError> {
        if r < 1 {
            return Err(MetricError::InvalidNullSamples);
        }
        for set in label_sets {
            let weak = set.iter().filter(|l| l.is_weak()).count();
            if weak == 0 || weak == set.len() {
                return Err(MetricError::SingleClassSample);
            }
        }
        let draws: Vec<f64> = (0..r).map(|i| null_statistic(label_sets, seed, i, mode)).collect();
        Ok(Self::from_draws(draws, seed, mode))
    }

    /// Assemble from replicate values already computed (e.g. in parallel);
    /// the draws must come from [`null_statistic`] with the same seed.
    pub fn from_draws(mut draws: Vec<f64>, seed: u64, mode: NullMode) -> Self {
        draws.sort_by(f64::total_cmp);
        NullSample { sorted: draws, seed, mode }
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn mode(&self) -> NullMode {
        self.mode
    }

    /// `p = (1 + #{null >= observed}) / (r + 1)`.
    pub fn pvalue(&self, observed: f64) -> PValue {
        // First index with null >= observed; everything from there counts.
        let ge = self.sorted.partition_point(|&x| x < observed);
        let count = (self.sorted.len() - ge) as f64;
        PValue {
            value: (1.0 + count) / (self.sorted.len() as f64 + 1.0),
            null_samples: self.sorted.len() as u64,
            null_seed: self.seed,
        }
    }
}

/// One null replicate: draw a standard-normal score vector for each test
/// set, take each set's Gini, and reduce per `mode` (average or initial
/// split only).
pub fn null_statistic(label_sets: &[&[Label]], seed: u64, replicate: u64, mode: NullMode) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, replicate));
    let mut sum = 0.0;
    let mut used = 0usize;
    for (s, set) in label_sets.iter().enumerate() {
        let scores: Vec<f64> =
            (0..set.len()).map(|_| StandardNormal.sample(&mut rng)).collect();
        // Label sets were validated two-class, so gini cannot fail here.
        let g = gini(&scores, set).unwrap_or(0.0);
        if mode == NullMode::Initial {
            if s == 0 {
                return g;
            }
        } else {
            sum += g;
            used += 1;
        }
    }
    sum / used as f64
}

/// Monte-Carlo p-value of an observed average Gini against the
/// random-scores null: for each of `r` replicates, draw independent
/// standard-normal scores for every test set, average the per-set Ginis,
/// and count replicates at or above `observed_avg`.
pub fn mc_pvalue(
    observed_avg: f64,
    test_label_sets: &[&[Label]],
    r: u64,
    seed: u64,
) -> Result<PValue, MetricError> {
    Ok(NullSample::generate(test_label_sets, r, seed, NullMode::Average)?.pvalue(observed_avg))
}

/// Confusion counts and derived rates at one threshold. Predicted Weak
/// means `score >= tau`. Ratios with zero denominators are `None`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConfusionMetrics {
    pub tau: f64,
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    pub fn_: usize,
    pub accuracy: f64,
    pub precision: Option<f64>,
    pub sensitivity: Option<f64>,
    pub f_measure: Option<f64>,
    pub specificity: Option<f64>,
}

/// Threshold the scores at `tau` and count against the labels.
pub fn confusion_metrics(scores: &[f64], labels: &[Label], tau: f64) -> ConfusionMetrics {
    debug_assert_eq!(scores.len(), labels.len());
    let (mut tp, mut fp, mut tn, mut fn_) = (0usize, 0usize, 0usize, 0usize);
    for (&s, &l) in scores.iter().zip(labels) {
        let predicted_weak = s >= tau;
        match (predicted_weak, l.is_weak()) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, false) => tn += 1,
            (false, true) => fn_ += 1,
        }
    }
    let ratio = |num: usize, den: usize| {
        if den == 0 {
            None
        } else {
            Some(num as f64 / den as f64)
        }
    };
    let n = scores.len();
    let precision = ratio(tp, tp + fp);
    let sensitivity = ratio(tp, tp + fn_);
    let f_measure = match (precision, sensitivity) {
        (Some(p), Some(s)) if p + s > 0.0 => Some(2.0 * p * s / (p + s)),
        _ => None,
    };
    ConfusionMetrics {
        tau,
        tp,
        fp,
        tn,
        fn_,
        accuracy: (tp + tn) as f64 / n as f64,
        precision,
        sensitivity,
        f_measure,
        specificity: ratio(tn, tn + fp),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use Label::{Good as G, Weak as W};

    /// O(n^2) pairwise Mann-Whitney oracle, independent of the rank path.
    pub(crate) fn auc_pairwise_oracle(scores: &[f64], labels: &[Label]) -> f64 {
        let mut wins = 0.0f64;
        let mut pairs = 0.0f64;
        for (i, &li) in labels.iter().enumerate() {
            if !li.is_weak() {
                continue;
            }
            for (j, &lj) in labels.iter().enumerate() {
                if lj.is_weak() {
                    continue;
                }
                pairs += 1.0;
                if scores[i] > scores[j] {
                    wins += 1.0;
                } else if scores[i] == scores[j] {
                    wins += 0.5;
                }
            }
        }
        wins / pairs
    }

    #[test]
    fn auc_matches_pairwise_oracle_on_spec_case() {
        let scores = [0.9, 0.8, 0.3, 0.1];
        let labels = [W, G, W, G];
        // Oracle: pairs (0.9,0.8)+, (0.9,0.1)+, (0.3,0.8)-, (0.3,0.1)+ -> 3/4.
        assert_eq!(auc_pairwise_oracle(&scores, &labels), 0.75);
        assert_eq!(auc(&scores, &labels).unwrap(), 0.75);
        assert_eq!(gini(&scores, &labels).unwrap(), 0.5);
    }

    #[test]
    fn auc_endpoints_exact() {
        let labels = [W, W, G, G, G];
        assert_eq!(auc(&[0.9, 0.8, 0.3, 0.2, 0.1], &labels).unwrap(), 1.0);
        assert_eq!(auc(&[0.1, 0.2, 0.8, 0.9, 0.95], &labels).unwrap(), 0.0);
        assert_eq!(auc(&[0.4; 5], &labels).unwrap(), 0.5);
        assert_eq!(gini(&[0.9, 0.8, 0.3, 0.2, 0.1], &labels).unwrap(), 1.0);
        assert_eq!(gini(&[0.1, 0.2, 0.8, 0.9, 0.95], &labels).unwrap(), -1.0);
        assert_eq!(gini(&[0.4; 5], &labels).unwrap(), 0.0);
    }

    #[test]
    fn auc_rejects_single_class() {
        assert_eq!(auc(&[0.1, 0.2], &[W, W]), Err(MetricError::SingleClassSample));
    }

    #[test]
    fn cap_perfect_ranking_captures_all_weak_at_their_share() {
        let labels = [W, W, W, G, G, G, G, G, G, G];
        let scores: Vec<f64> = (0..10).map(|i| 1.0 - i as f64 / 10.0).collect();
        let curve = cap_curve(&scores, &labels).unwrap();
        assert_eq!(curve.points.first(), Some(&(0.0, 0.0)));
        assert_eq!(curve.points.last(), Some(&(1.0, 1.0)));
        assert_eq!(curve.full_capture_fraction(), 0.3);
    }

    #[test]
    fn cap_spec_case_full_capture_at_three_quarters() {
        // Descending order: 0.9(W), 0.8(G), 0.3(W), 0.1(G); second weak
        // student arrives at position 3 of 4.
        let curve = cap_curve(&[0.9, 0.8, 0.3, 0.1], &[W, G, W, G]).unwrap();
        assert_eq!(curve.full_capture_fraction(), 0.75);
    }

    #[test]
    fn cap_ties_broken_by_ascending_index() {
        let a = cap_curve(&[0.5, 0.5, 0.2], &[W, G, W]).unwrap();
        let b = cap_curve(&[0.5, 0.5, 0.2], &[W, G, W]).unwrap();
        assert_eq!(a, b);
        // Index 0 (weak) is examined before index 1 at the tied score.
        assert_eq!(a.points[1], (1.0 / 3.0, 0.5));
    }

    #[test]
    fn cap_random_scores_stay_near_diagonal() {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let n = 2000;
        let labels: Vec<Label> = (0..n).map(|i| if i % 4 == 0 { W } else { G }).collect();
        let scores: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
        let curve = cap_curve(&scores, &labels).unwrap();
        for &(x, y) in &curve.points {
            assert!((y - x).abs() < 0.12, "CAP strayed from diagonal at ({x}, {y})");
        }
    }

    #[test]
    fn pvalue_of_perfect_avg_is_add_one_floor() {
        let set: Vec<Label> = (0..20).map(|i| if i < 10 { W } else { G }).collect();
        let sets: Vec<&[Label]> = (0..6).map(|_| set.as_slice()).collect();
        let p = mc_pvalue(1.0, &sets, 10_000, 5).unwrap();
        assert_eq!(p.value, 1.0 / 10_001.0);
    }

    #[test]
    fn pvalue_of_minus_one_is_one() {
        let set = [W, W, G, G, G];
        let sets: Vec<&[Label]> = (0..6).map(|_| set.as_slice()).collect();
        let p = mc_pvalue(-1.0, &sets, 500, 5).unwrap();
        assert_eq!(p.value, 1.0);
    }

    #[test]
    fn pvalue_of_zero_is_near_half() {
        let set: Vec<Label> = (0..24).map(|i| if i % 2 == 0 { W } else { G }).collect();
        let sets: Vec<&[Label]> = (0..6).map(|_| set.as_slice()).collect();
        let p = mc_pvalue(0.0, &sets, 10_000, 11).unwrap();
        // Null average Gini is symmetric about 0; 3 binomial sigmas at
        // R=10^4 is ~0.015.
        assert!((p.value - 0.5).abs() < 0.02, "p = {}", p.value);
    }

    #[test]
    fn null_sample_matches_mc_pvalue_bit_exactly() {
        let set = [W, W, W, G, G, G, G];
        let sets: Vec<&[Label]> = (0..6).map(|_| set.as_slice()).collect();
        let null = NullSample::generate(&sets, 2_000, 77, NullMode::Average).unwrap();
        for observed in [-0.5, 0.0, 0.21, 0.8] {
            assert_eq!(null.pvalue(observed), mc_pvalue(observed, &sets, 2_000, 77).unwrap());
        }
    }

    #[test]
    fn null_sample_reassembles_from_parallel_draws() {
        let set = [W, W, G, G, G, G];
        let sets: Vec<&[Label]> = (0..6).map(|_| set.as_slice()).collect();
        let whole = NullSample::generate(&sets, 100, 3, NullMode::Average).unwrap();
        // Simulate two workers producing disjoint replicate ranges.
        let mut draws: Vec<f64> =
            (50..100).map(|i| null_statistic(&sets, 3, i, NullMode::Average)).collect();
        let mut head: Vec<f64> =
            (0..50).map(|i| null_statistic(&sets, 3, i, NullMode::Average)).collect();
        head.append(&mut draws);
        assert_eq!(whole, NullSample::from_draws(head, 3, NullMode::Average));
    }

    #[test]
    fn initial_mode_uses_only_the_first_set() {
        let small = [W, G];
        let big: Vec<Label> = (0..30).map(|i| if i < 15 { W } else { G }).collect();
        let sets: Vec<&[Label]> = vec![&small, &big, &big, &big, &big, &big];
        // With a 1W/1G initial set the null statistic is always +-1.
        for r in 0..50 {
            let s = null_statistic(&sets, 4, r, NullMode::Initial);
            assert!(s == 1.0 || s == -1.0);
        }
    }

    #[test]
    fn confusion_perfect_predictor_all_ones() {
        let labels = [W, G, W, G];
        let scores = [1.0, 0.0, 1.0, 0.0];
        let m = confusion_metrics(&scores, &labels, 0.5);
        assert_eq!((m.tp, m.fp, m.tn, m.fn_), (2, 0, 2, 0));
        assert_eq!(m.accuracy, 1.0);
        assert_eq!(m.precision, Some(1.0));
        assert_eq!(m.sensitivity, Some(1.0));
        assert_eq!(m.f_measure, Some(1.0));
        assert_eq!(m.specificity, Some(1.0));
    }

    #[test]
    fn confusion_tau_zero_predicts_everyone_weak() {
        let labels = [W, G, G, W, G];
        let scores = [0.3, 0.9, 0.1, 0.0, 0.7];
        let m = confusion_metrics(&scores, &labels, 0.0);
        assert_eq!(m.sensitivity, Some(1.0));
        assert_eq!(m.specificity, Some(0.0));
        assert_eq!(m.tn, 0);
    }

    #[test]
    fn confusion_undefined_ratios_are_absent() {
        // No predicted weak -> precision undefined; all good -> sensitivity undefined.
        let m = confusion_metrics(&[0.1, 0.2], &[G, G], 0.9);
        assert_eq!(m.precision, None);
        assert_eq!(m.sensitivity, None);
        assert_eq!(m.f_measure, None);
        assert_eq!(m.specificity, Some(1.0));
    }

    #[test]
    fn table11_shaped_fixture_consistent_with_counts() {
        // Counts shaped like the Dataset-1 stage-20 evaluation: 15 test
        // students, 7 weak. Scores placed so tau=0.35 yields tp=5, fp=1,
        // tn=7, fn=2 -> accuracy 0.800, precision 0.833, sensitivity 0.714,
        // F 0.769, specificity 0.875.
        let labels = [W, W, W, W, W, W, W, G, G, G, G, G, G, G, G];
        let scores = [
            0.9, 0.8, 0.7, 0.6, 0.5, 0.2, 0.1, // weak: 5 above tau, 2 below
            0.4, 0.3, 0.3, 0.2, 0.2, 0.1, 0.1, 0.05, // good: 1 above tau
        ];
        let m = confusion_metrics(&scores, &labels, 0.35);
        assert_eq!((m.tp, m.fp, m.tn, m.fn_), (5, 1, 7, 2));
        assert!((m.accuracy - 0.800).abs() < 5e-4);
        assert!((m.precision.unwrap() - 0.833).abs() < 5e-4);
        assert!((m.sensitivity.unwrap() - 0.714).abs() < 5e-4);
        assert!((m.f_measure.unwrap() - 0.769).abs() < 5e-4);
        assert!((m.specificity.unwrap() - 0.875).abs() < 5e-4);
    }
}
