//! Stratified train/test splitting and k-fold partitioning.
//!
//! Splits preserve the Weak/Good proportion on both sides to within one
//! student and are fully determined by `(dataset, fraction, seed)`.

use alloc::vec::Vec;
use core::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dataset::{Dataset, Label};
use crate::math::{derive_seed, round_half_up};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitError {
    /// A label has fewer than two members, so both sides cannot be covered.
    InsufficientClassMembers { weak: usize, good: usize },
    /// Train fraction outside (0, 1).
    InvalidFraction,
    /// k below 2 or larger than the index set.
    InvalidK { k: usize, n: usize },
    /// Some fold's complement contains a single label only.
    DegenerateFold { fold: usize },
}

impl fmt::Display for SplitError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SplitError::InsufficientClassMembers { weak, good } => {
                write!(f, "need at least 2 students per label, got {weak} weak / {good} good")
            }
            SplitError::InvalidFraction => write!(f, "train fraction must lie in (0, 1)"),
            SplitError::InvalidK { k, n } => write!(f, "invalid fold count k={k} for {n} indices"),
            SplitError::DegenerateFold { fold } => {
                write!(f, "fold {fold}: training complement holds a single label")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for SplitError {}

/// One disjoint train/test partition over dataset indices.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Split {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// Six stratified splits: index 0 is the initial split, 1..=5 the extras.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SplitPlan {
    pub splits: Vec<Split>,
    pub train_fraction: f64_bits::F64Bits,
    pub master_seed: u64,
}

/// Total number of splits in a plan (initial + 5 extras).
pub const SPLITS_PER_PLAN: usize = 6;

mod f64_bits {
    //! f64 wrapper with Eq via bit pattern, so plans compare exactly.
    use core::fmt;

    #[derive(Clone, Copy, PartialEq)]
    #[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
    #[cfg_attr(feature = "serde", serde(transparent))]
    pub struct F64Bits(pub f64);

    impl Eq for F64Bits {}

    impl fmt::Debug for F64Bits {
        fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            self.0.fmt(f)
        }
    }

    impl From<f64> for F64Bits {
        fn from(v: f64) -> Self {
            F64Bits(v)
        }
    }
}

/// k disjoint folds over a training index set.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FoldPlan {
    pub k: usize,
    pub folds: Vec<Vec<usize>>,
}

impl FoldPlan {
    /// Training complement of one fold: every planned index not in it.
    pub fn complement(&self, fold: usize) -> Vec<usize> {
        let mut out = Vec::new();
        for (i, f) in self.folds.iter().enumerate() {
            if i != fold {
                out.extend_from_slice(f);
            }
        }
        out.sort_unstable();
        out
    }
}

/// Allocate the per-label train count: round half up, clamped so both sides
/// keep at least one member.
fn train_count(label_total: usize, frac: f64) -> usize {
    let raw = round_half_up(frac * label_total as f64) as usize;
    raw.clamp(1, label_total - 1)
}

/// Stratified train/test split.
///
/// Per label, round-half-up of `frac * count` members go to train (both
/// sides keep at least one); assignment within a label is a seeded uniform
/// shuffle. Returned index lists are sorted ascending.
pub fn stratified_split(
    ds: &Dataset,
    frac: f64,
    seed: u64,
) -> Result<(Vec<usize>, Vec<usize>), SplitError> {
    if !(frac > 0.0 && frac < 1.0) {
        return Err(SplitError::InvalidFraction);
    }
    let (weak, good) = ds.label_counts();
    if weak < 2 || good < 2 {
        return Err(SplitError::InsufficientClassMembers { weak, good });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    // Weak first, then Good, on one rng stream: order is part of the contract.
    for label in [Label::Weak, Label::Good] {
        let mut members: Vec<usize> =
            (0..ds.n_students()).filter(|&i| ds.label(i) == label).collect();
        members.shuffle(&mut rng);
        let n_train = train_count(members.len(), frac);
        train.extend_from_slice(&members[..n_train]);
        test.extend_from_slice(&members[n_train..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

/// Build the full six-split plan; split `i` uses `derive_seed(master, i)`.
pub fn make_split_plan(ds: &Dataset, frac: f64, master_seed: u64) -> Result<SplitPlan, SplitError> {
    let mut splits = Vec::with_capacity(SPLITS_PER_PLAN);
    for i in 0..SPLITS_PER_PLAN {
        let (train, test) = stratified_split(ds, frac, derive_seed(master_seed, i as u64))?;
        splits.push(Split { train, test });
    }
    Ok(SplitPlan { splits, train_fraction: frac.into(), master_seed })
}

/// Stratified k-fold partition of a training index set.
///
/// Members of each label are shuffled, then dealt round-robin with a
/// dealing cursor that carries across labels, so fold sizes differ by at
/// most one. Errors with [`SplitError::DegenerateFold`] if any fold's
/// complement would be single-label.
pub fn kfold(
    train_indices: &[usize],
    k: usize,
    seed: u64,
    labels: &[Label],
) -> Result<FoldPlan, SplitError> {
    let n = train_indices.len();
    if k < 2 || k > n {
        return Err(SplitError::InvalidK { k, n });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut folds: Vec<Vec<usize>> = (0..k).map(|_| Vec::new()).collect();
    let mut cursor = 0usize;
    for label in [Label::Weak, Label::Good] {
        let mut members: Vec<usize> =
            train_indices.iter().copied().filter(|&i| labels[i] == label).collect();
        members.shuffle(&mut rng);
        for idx in members {
            folds[cursor % k].push(idx);
            cursor += 1;
        }
    }
    for fold in &mut folds {
        fold.sort_unstable();
    }

    let plan = FoldPlan { k, folds };
    for fold in 0..k {
        let comp = plan.complement(fold);
        let weak = comp.iter().filter(|&&i| labels[i].is_weak()).count();
        if weak == 0 || weak == comp.len() {
            return Err(SplitError::DegenerateFold { fold });
        }
    }
    Ok(plan)
}
