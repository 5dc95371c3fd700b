//! Grade datasets and preprocessing.
//!
//! A [`RawDataset`] holds per-student marks exactly as ingested (possibly
//! absent, on arbitrary per-feature scales). [`preprocess`] zero-fills
//! absent marks, rescales every feature to a percent mark, rounds half up
//! to the nearest integer, and labels each student Good or Weak from the
//! final grade, producing the [`Dataset`] every downstream stage works on.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::math::round_half_up;

/// Course-delivery stage whose marks are available as features.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Stage {
    /// Roughly 20% of the coursework graded.
    Stage20,
    /// Roughly 50% of the coursework graded.
    Stage50,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Stage::Stage20 => write!(f, "stage20"),
            Stage::Stage50 => write!(f, "stage50"),
        }
    }
}

/// Binary target. Weak (final grade <= 59) is the positive class everywhere.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Label {
    Good,
    Weak,
}

impl Label {
    /// Label rule: Weak iff the final grade is below the passing mark of 60.
    pub fn from_final_grade(grade: f64) -> Label {
        if grade >= 60.0 {
            Label::Good
        } else {
            Label::Weak
        }
    }

    pub fn is_weak(self) -> bool {
        self == Label::Weak
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Good => write!(f, "G"),
            Label::Weak => write!(f, "W"),
        }
    }
}

/// Errors raised while constructing or preprocessing datasets.
#[derive(Debug, Clone, PartialEq)]
pub enum DataError {
    /// A row's width does not match the feature list.
    RowWidth { student: usize, expected: usize, got: usize },
    /// A feature's maximum attainable mark is not strictly positive.
    NonPositiveFeatureMax { feature: String },
    /// A raw mark is negative or exceeds the feature maximum.
    MarkOutOfRange { student: usize, feature: String, value: f64 },
    /// A final grade lies outside [0, 100].
    GradeOutOfRange { student: usize, value: f64 },
    /// Mismatched per-student vector lengths (ids, rows, grades).
    LengthMismatch,
    /// A requested feature name is not present in the raw dataset.
    UnknownFeature { feature: String },
    /// A stage feature list selected no features.
    EmptyFeatureSet,
}

impl fmt::Display for DataError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DataError::RowWidth { student, expected, got } => {
                write!(f, "student {student}: row has {got} marks, expected {expected}")
            }
            DataError::NonPositiveFeatureMax { feature } => {
                write!(f, "feature {feature}: maximum mark must be positive")
            }
            DataError::MarkOutOfRange { student, feature, value } => {
                write!(f, "student {student}, feature {feature}: mark {value} outside [0, max]")
            }
            DataError::GradeOutOfRange { student, value } => {
                write!(f, "student {student}: final grade {value} outside [0, 100]")
            }
            DataError::LengthMismatch => write!(f, "ids, mark rows and grades differ in length"),
            DataError::UnknownFeature { feature } => write!(f, "unknown feature {feature}"),
            DataError::EmptyFeatureSet => write!(f, "stage selects no features"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for DataError {}

/// Ingested marks before preprocessing. Absent marks stay absent here;
/// zero-filling happens in [`preprocess`].
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RawDataset {
    student_ids: Vec<String>,
    feature_names: Vec<String>,
    raw_marks: Vec<Vec<Option<f64>>>,
    feature_max: Vec<f64>,
    final_grades: Vec<f64>,
}

impl RawDataset {
    /// Validates widths, positive feature maxima, mark ranges and grade
    /// ranges; row order is preserved.
    pub fn new(
        student_ids: Vec<String>,
        feature_names: Vec<String>,
        raw_marks: Vec<Vec<Option<f64>>>,
        feature_max: Vec<f64>,
        final_grades: Vec<f64>,
    ) -> Result<Self, DataError> {
        if student_ids.len() != raw_marks.len() || student_ids.len() != final_grades.len() {
            return Err(DataError::LengthMismatch);
        }
        if feature_names.len() != feature_max.len() {
            return Err(DataError::LengthMismatch);
        }
        for (j, &max) in feature_max.iter().enumerate() {
            if !(max > 0.0) {
                return Err(DataError::NonPositiveFeatureMax { feature: feature_names[j].clone() });
            }
        }
        for (i, row) in raw_marks.iter().enumerate() {
            if row.len() != feature_names.len() {
                return Err(DataError::RowWidth {
                    student: i,
                    expected: feature_names.len(),
                    got: row.len(),
                });
            }
            for (j, mark) in row.iter().enumerate() {
                if let Some(v) = *mark {
                    if !v.is_finite() || v < 0.0 || v > feature_max[j] {
                        return Err(DataError::MarkOutOfRange {
                            student: i,
                            feature: feature_names[j].clone(),
                            value: v,
                        });
                    }
                }
            }
        }
        for (i, &g) in final_grades.iter().enumerate() {
            if !(0.0..=100.0).contains(&g) {
                return Err(DataError::GradeOutOfRange { student: i, value: g });
            }
        }
        Ok(Self { student_ids, feature_names, raw_marks, feature_max, final_grades })
    }

    pub fn n_students(&self) -> usize {
        self.student_ids.len()
    }

    pub fn student_ids(&self) -> &[String] {
        &self.student_ids
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn feature_max(&self) -> &[f64] {
        &self.feature_max
    }

    pub fn raw_marks(&self) -> &[Vec<Option<f64>>] {
        &self.raw_marks
    }

    pub fn final_grades(&self) -> &[f64] {
        &self.final_grades
    }
}

/// Preprocessed dataset: integer percent marks plus Good/Weak labels.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Dataset {
    student_ids: Vec<String>,
    feature_names: Vec<String>,
    marks: Vec<Vec<u8>>,
    labels: Vec<Label>,
    stage: Stage,
}

impl Dataset {
    /// Builds a dataset from already-percent marks (each in 0..=100).
    pub fn new(
        student_ids: Vec<String>,
        feature_names: Vec<String>,
        marks: Vec<Vec<u8>>,
        labels: Vec<Label>,
        stage: Stage,
    ) -> Result<Self, DataError> {
        if student_ids.len() != marks.len() || student_ids.len() != labels.len() {
            return Err(DataError::LengthMismatch);
        }
        for (i, row) in marks.iter().enumerate() {
            if row.len() != feature_names.len() {
                return Err(DataError::RowWidth {
                    student: i,
                    expected: feature_names.len(),
                    got: row.len(),
                });
            }
            for (j, &m) in row.iter().enumerate() {
                if m > 100 {
                    return Err(DataError::MarkOutOfRange {
                        student: i,
                        feature: feature_names[j].clone(),
                        value: m as f64,
                    });
                }
            }
        }
        Ok(Self { student_ids, feature_names, marks, labels, stage })
    }

    pub fn n_students(&self) -> usize {
        self.student_ids.len()
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn student_ids(&self) -> &[String] {
        &self.student_ids
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn stage(&self) -> Stage {
        self.stage
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn label(&self, student: usize) -> Label {
        self.labels[student]
    }

    pub fn mark(&self, student: usize, feature: usize) -> u8 {
        self.marks[student][feature]
    }

    /// Percent marks of one student as f64, the form the learners consume.
    pub fn percent_row(&self, student: usize) -> Vec<f64> {
        self.marks[student].iter().map(|&m| m as f64).collect()
    }

    /// Percent-mark matrix restricted to `indices`, row order following the
    /// index list.
    pub fn rows_for(&self, indices: &[usize]) -> Vec<Vec<f64>> {
        indices.iter().map(|&i| self.percent_row(i)).collect()
    }

    /// Labels restricted to `indices`.
    pub fn labels_for(&self, indices: &[usize]) -> Vec<Label> {
        indices.iter().map(|&i| self.labels[i]).collect()
    }

    /// (weak, good) counts over the whole dataset.
    pub fn label_counts(&self) -> (usize, usize) {
        let weak = self.labels.iter().filter(|l| l.is_weak()).count();
        (weak, self.labels.len() - weak)
    }

    /// (weak, good) counts over an index set.
    pub fn label_counts_for(&self, indices: &[usize]) -> (usize, usize) {
        let weak = indices.iter().filter(|&&i| self.labels[i].is_weak()).count();
        (weak, indices.len() - weak)
    }
}

/// Scale one raw mark to an integer percent: absent becomes 0, otherwise
/// mark/max*100 rounded half up.
fn percent_mark(mark: Option<f64>, max: f64) -> u8 {
    match mark {
        None => 0,
        Some(v) => round_half_up(v / max * 100.0) as u8,
    }
}

/// Preprocess a raw dataset for one stage.
///
/// `stage_features` lists the feature names visible at that stage, in the
/// order they should appear; every name must exist in `raw`. Absent marks
/// become 0, marks are rescaled to percent and rounded half up, and labels
/// derive from the final grade (Weak <= 59, Good >= 60).
pub fn preprocess(raw: &RawDataset, stage: Stage, stage_features: &[String]) -> Result<Dataset, DataError> {
    if stage_features.is_empty() {
        return Err(DataError::EmptyFeatureSet);
    }
    let mut columns = Vec::with_capacity(stage_features.len());
    for name in stage_features {
        let j = raw
            .feature_names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| DataError::UnknownFeature { feature: name.clone() })?;
        columns.push(j);
    }

    let marks: Vec<Vec<u8>> = raw
        .raw_marks
        .iter()
        .map(|row| columns.iter().map(|&j| percent_mark(row[j], raw.feature_max[j])).collect())
        .collect();
    let labels: Vec<Label> = raw.final_grades.iter().map(|&g| Label::from_final_grade(g)).collect();

    Dataset::new(raw.student_ids.clone(), stage_features.to_vec(), marks, labels, stage)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    fn names(ns: &[&str]) -> Vec<String> {
        ns.iter().map(|s| s.to_string()).collect()
    }

    fn raw_one_student(marks: Vec<Option<f64>>, maxes: Vec<f64>, grade: f64) -> RawDataset {
        let n = marks.len();
        let feature_names = (0..n).map(|i| alloc::format!("f{i}")).collect();
        RawDataset::new(vec!["std001".to_string()], feature_names, vec![marks], maxes, vec![grade])
            .unwrap()
    }

    #[test]
    fn scales_to_percent_and_rounds_half_up() {
        // 1.5 out of 2 -> 75
        let raw = raw_one_student(vec![Some(1.5)], vec![2.0], 80.0);
        let ds = preprocess(&raw, Stage::Stage20, &names(&["f0"])).unwrap();
        assert_eq!(ds.mark(0, 0), 75);

        // 1 out of 3 -> 33.33 -> 33; 2 out of 3 -> 66.67 -> 67
        let raw = raw_one_student(vec![Some(1.0), Some(2.0)], vec![3.0, 3.0], 80.0);
        let ds = preprocess(&raw, Stage::Stage20, &names(&["f0", "f1"])).unwrap();
        assert_eq!(ds.mark(0, 0), 33);
        assert_eq!(ds.mark(0, 1), 67);
    }

    #[test]
    fn absent_mark_becomes_zero() {
        let raw = raw_one_student(vec![None, Some(80.0)], vec![3.0, 100.0], 50.0);
        let ds = preprocess(&raw, Stage::Stage20, &names(&["f0", "f1"])).unwrap();
        assert_eq!(ds.mark(0, 0), 0);
        assert_eq!(ds.mark(0, 1), 80);
    }

    #[test]
    fn label_boundary_at_60() {
        assert_eq!(Label::from_final_grade(59.0), Label::Weak);
        assert_eq!(Label::from_final_grade(60.0), Label::Good);
        assert_eq!(Label::from_final_grade(0.0), Label::Weak);
        assert_eq!(Label::from_final_grade(100.0), Label::Good);
    }

    #[test]
    fn stage_subset_selects_and_orders_columns() {
        let raw = RawDataset::new(
            vec!["a".to_string(), "b".to_string()],
            names(&["q1", "q2", "q3"]),
            vec![
                vec![Some(1.0), Some(2.0), Some(3.0)],
                vec![Some(0.0), Some(1.0), Some(1.5)],
            ],
            vec![2.0, 2.0, 3.0],
            vec![70.0, 40.0],
        )
        .unwrap();
        let ds = preprocess(&raw, Stage::Stage20, &names(&["q3", "q1"])).unwrap();
        assert_eq!(ds.feature_names(), &names(&["q3", "q1"])[..]);
        assert_eq!(ds.percent_row(0), vec![100.0, 50.0]);
        assert_eq!(ds.labels(), &[Label::Good, Label::Weak]);
    }

    #[test]
    fn unknown_stage_feature_is_an_error() {
        let raw = raw_one_student(vec![Some(1.0)], vec![2.0], 70.0);
        let err = preprocess(&raw, Stage::Stage20, &names(&["nope"])).unwrap_err();
        assert!(matches!(err, DataError::UnknownFeature { .. }));
    }

    #[test]
    fn mark_above_feature_max_rejected_at_ingest() {
        let err = RawDataset::new(
            vec!["a".to_string()],
            names(&["q1"]),
            vec![vec![Some(2.5)]],
            vec![2.0],
            vec![70.0],
        )
        .unwrap_err();
        assert!(matches!(err, DataError::MarkOutOfRange { .. }));
    }

    #[test]
    fn preprocessing_idempotent_on_percent_marks() {
        let raw = raw_one_student(vec![Some(1.0), Some(1.7)], vec![2.0, 3.0], 55.0);
        let ds1 = preprocess(&raw, Stage::Stage50, &names(&["f0", "f1"])).unwrap();
        // Re-ingest the percent marks with max 100 and preprocess again.
        let raw2 = RawDataset::new(
            ds1.student_ids().to_vec(),
            ds1.feature_names().to_vec(),
            (0..ds1.n_students())
                .map(|i| ds1.percent_row(i).into_iter().map(Some).collect())
                .collect(),
            vec![100.0; ds1.n_features()],
            vec![55.0],
        )
        .unwrap();
        let ds2 = preprocess(&raw2, Stage::Stage50, &names(&["f0", "f1"])).unwrap();
        assert_eq!(ds1, ds2);
    }
}
