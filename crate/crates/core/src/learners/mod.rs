//! The six base classifiers behind one train/score interface.
//!
//! Every trained model emits a per-student score in [0, 1] read as the
//! probability of being a Weak student. Training is deterministic in
//! `(algorithm, params, data, seed)`; a model is immutable once trained and
//! safe to score from multiple threads.
//!
//! Scale conventions: KNN and RF consume percent marks directly; LREG, SVM
//! and MLP rescale marks to [0, 1] internally (mark / 100).

mod knn;
mod lreg;
mod mlp;
mod nb;
mod platt;
mod rf;
mod svm;

pub use platt::{platt_calibrate, PlattCalibration};

use alloc::borrow::ToOwned;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::ops::Deref;

use crate::dataset::{Dataset, Label};

/// The six algorithms, in the fixed order used for table columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum AlgorithmId {
    Rf,
    Mlp,
    Nb,
    Knn,
    Lreg,
    Svm,
}

impl AlgorithmId {
    /// All algorithms in table-column order.
    pub const ALL: [AlgorithmId; 6] =
        [AlgorithmId::Rf, AlgorithmId::Mlp, AlgorithmId::Nb, AlgorithmId::Knn, AlgorithmId::Lreg, AlgorithmId::Svm];

    /// Column position in the selection table.
    pub fn index(self) -> usize {
        Self::ALL.iter().position(|&a| a == self).unwrap()
    }

    /// Selection-table column name.
    pub fn column_name(self) -> &'static str {
        match self {
            AlgorithmId::Rf => "rf",
            AlgorithmId::Mlp => "mlp",
            AlgorithmId::Nb => "bn",
            AlgorithmId::Knn => "knn",
            AlgorithmId::Lreg => "lreg",
            AlgorithmId::Svm => "svm",
        }
    }

    /// Parse a column name back to an algorithm.
    pub fn from_column_name(name: &str) -> Option<AlgorithmId> {
        Self::ALL.into_iter().find(|a| a.column_name() == name)
    }
}

impl fmt::Display for AlgorithmId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.column_name())
    }
}

/// A single hyperparameter value.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(untagged))]
pub enum ParamValue {
    Bool(bool),
    Int(i64),
    Float(f64),
}

impl ParamValue {
    pub fn as_f64(self) -> Option<f64> {
        match self {
            ParamValue::Float(v) => Some(v),
            ParamValue::Int(v) => Some(v as f64),
            ParamValue::Bool(_) => None,
        }
    }

    pub fn as_usize(self) -> Option<usize> {
        match self {
            ParamValue::Int(v) if v >= 0 => Some(v as usize),
            _ => None,
        }
    }

    pub fn as_bool(self) -> Option<bool> {
        match self {
            ParamValue::Bool(b) => Some(b),
            _ => None,
        }
    }
}

impl fmt::Display for ParamValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamValue::Bool(b) => write!(f, "{b}"),
            ParamValue::Int(v) => write!(f, "{v}"),
            ParamValue::Float(v) => write!(f, "{v}"),
        }
    }
}

/// One point of an algorithm's hyperparameter space: named values in a
/// stable order.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ParamPoint {
    pub algorithm: AlgorithmId,
    entries: Vec<(String, ParamValue)>,
}

impl ParamPoint {
    /// Empty parameter point (all of LREG's space).
    pub fn empty(algorithm: AlgorithmId) -> Self {
        ParamPoint { algorithm, entries: Vec::new() }
    }

    pub fn with(mut self, name: &str, value: ParamValue) -> Self {
        self.entries.push((name.to_owned(), value));
        self
    }

    pub fn get(&self, name: &str) -> Option<ParamValue> {
        self.entries.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }

    pub fn entries(&self) -> &[(String, ParamValue)] {
        &self.entries
    }

    fn require_f64(&self, name: &str) -> Result<f64, LearnError> {
        self.get(name)
            .and_then(ParamValue::as_f64)
            .ok_or_else(|| LearnError::BadParam { algorithm: self.algorithm, name: name.to_owned() })
    }

    fn require_usize(&self, name: &str) -> Result<usize, LearnError> {
        self.get(name)
            .and_then(ParamValue::as_usize)
            .ok_or_else(|| LearnError::BadParam { algorithm: self.algorithm, name: name.to_owned() })
    }

    fn require_bool(&self, name: &str) -> Result<bool, LearnError> {
        self.get(name)
            .and_then(ParamValue::as_bool)
            .ok_or_else(|| LearnError::BadParam { algorithm: self.algorithm, name: name.to_owned() })
    }
}

impl fmt::Display for ParamPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.entries.is_empty() {
            return write!(f, "default");
        }
        for (i, (name, value)) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{name}={value}")?;
        }
        Ok(())
    }
}

/// Per-student Weak-probability scores aligned to an index set.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScoreVector(Vec<f64>);

impl ScoreVector {
    /// Wraps scores, checking every entry is finite and within [0, 1].
    pub fn new(values: Vec<f64>) -> Result<Self, LearnError> {
        for &v in &values {
            if !v.is_finite() || !(0.0..=1.0).contains(&v) {
                return Err(LearnError::ScoreOutOfRange { value: v });
            }
        }
        Ok(ScoreVector(values))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for ScoreVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LearnError {
    /// Training set holds a single label.
    SingleClassTrainingSet,
    /// Training set is empty or rows are inconsistent.
    EmptyTrainingSet,
    /// Scoring input does not match the training schema.
    SchemaMismatch { expected: Vec<String>, got: Vec<String> },
    /// Scoring row width differs from the training width.
    WidthMismatch { expected: usize, got: usize },
    /// A required parameter is missing or has the wrong type.
    BadParam { algorithm: AlgorithmId, name: String },
    /// A model produced a score outside [0, 1]; indicates a bug upstream.
    ScoreOutOfRange { value: f64 },
}

impl fmt::Display for LearnError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LearnError::SingleClassTrainingSet => {
                write!(f, "training set contains a single label")
            }
            LearnError::EmptyTrainingSet => write!(f, "training set is empty"),
            LearnError::SchemaMismatch { expected, got } => {
                write!(f, "feature schema mismatch: expected {expected:?}, got {got:?}")
            }
            LearnError::WidthMismatch { expected, got } => {
                write!(f, "row width mismatch: expected {expected}, got {got}")
            }
            LearnError::BadParam { algorithm, name } => {
                write!(f, "{algorithm}: missing or mistyped parameter {name}")
            }
            LearnError::ScoreOutOfRange { value } => {
                write!(f, "score {value} outside [0, 1]")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for LearnError {}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
enum ModelState {
    Knn(knn::KnnState),
    Nb(nb::NbState),
    Lreg(lreg::LregState),
    Rf(rf::RfState),
    Svm(svm::SvmState),
    Mlp(mlp::MlpState),
}

/// A fitted classifier. Scores are deterministic functions of the fitted
/// state and the input row.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrainedModel {
    algorithm: AlgorithmId,
    params: ParamPoint,
    feature_names: Vec<String>,
    train_seed: u64,
    converged: bool,
    state: ModelState,
}

impl TrainedModel {
    pub fn algorithm(&self) -> AlgorithmId {
        self.algorithm
    }

    pub fn params(&self) -> &ParamPoint {
        &self.params
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn train_seed(&self) -> u64 {
        self.train_seed
    }

    /// False when an iterative fit hit its epoch/pass cap before its stop
    /// criterion; the model is still usable (best-effort state).
    pub fn converged(&self) -> bool {
        self.converged
    }

    /// Score dataset rows selected by `indices`, after checking the feature
    /// schema matches training.
    pub fn score(&self, ds: &Dataset, indices: &[usize]) -> Result<ScoreVector, LearnError> {
        if ds.feature_names() != self.feature_names {
            return Err(LearnError::SchemaMismatch {
                expected: self.feature_names.clone(),
                got: ds.feature_names().to_vec(),
            });
        }
        self.score_rows(&ds.rows_for(indices))
    }

    /// Score raw percent-mark rows whose columns align with
    /// [`TrainedModel::feature_names`].
    pub fn score_rows(&self, rows: &[Vec<f64>]) -> Result<ScoreVector, LearnError> {
        let width = self.feature_names.len();
        for row in rows {
            if row.len() != width {
                return Err(LearnError::WidthMismatch { expected: width, got: row.len() });
            }
        }
        let values: Vec<f64> = rows.iter().map(|row| self.score_row(row)).collect();
        ScoreVector::new(values)
    }

    fn score_row(&self, row: &[f64]) -> f64 {
        match &self.state {
            ModelState::Knn(s) => s.score_row(row),
            ModelState::Nb(s) => s.score_row(row),
            ModelState::Lreg(s) => s.score_row(row),
            ModelState::Rf(s) => s.score_row(row),
            ModelState::Svm(s) => s.score_row(row),
            ModelState::Mlp(s) => s.score_row(row),
        }
    }

    /// Per-tree Weak votes of a random forest for one row; used to audit
    /// that the forest score is an exact vote fraction.
    #[cfg(test)]
    pub(crate) fn rf_tree_votes(&self, row: &[f64]) -> Option<Vec<bool>> {
        match &self.state {
            ModelState::Rf(s) => Some(s.tree_votes(row)),
            _ => None,
        }
    }

    /// Test-only direct construction of a logistic model from fixed weights.
    #[cfg(test)]
    pub(crate) fn lreg_from_weights(
        feature_names: Vec<String>,
        weights: Vec<f64>,
        intercept: f64,
    ) -> TrainedModel {
        TrainedModel {
            algorithm: AlgorithmId::Lreg,
            params: ParamPoint::empty(AlgorithmId::Lreg),
            feature_names,
            train_seed: 0,
            converged: true,
            state: ModelState::Lreg(lreg::LregState::from_weights(weights, intercept)),
        }
    }
}

/// Train `algorithm` on the dataset rows selected by `train_indices`.
pub fn train(
    algorithm: AlgorithmId,
    params: &ParamPoint,
    ds: &Dataset,
    train_indices: &[usize],
    seed: u64,
) -> Result<TrainedModel, LearnError> {
    train_rows(
        algorithm,
        params,
        ds.rows_for(train_indices),
        ds.labels_for(train_indices),
        ds.feature_names().to_vec(),
        seed,
    )
}

/// Train on raw percent-mark rows. This is the entry point for callers that
/// build their own feature matrices (e.g. decision-boundary grids over
/// principal components).
pub fn train_rows(
    algorithm: AlgorithmId,
    params: &ParamPoint,
    rows: Vec<Vec<f64>>,
    labels: Vec<Label>,
    feature_names: Vec<String>,
    seed: u64,
) -> Result<TrainedModel, LearnError> {
    if rows.is_empty() || rows.len() != labels.len() {
        return Err(LearnError::EmptyTrainingSet);
    }
    let width = feature_names.len();
    if rows.iter().any(|r| r.len() != width) {
        return Err(LearnError::WidthMismatch { expected: width, got: 0 });
    }
    let weak = labels.iter().filter(|l| l.is_weak()).count();
    if weak == 0 || weak == labels.len() {
        return Err(LearnError::SingleClassTrainingSet);
    }

    let (state, converged) = match algorithm {
        AlgorithmId::Knn => {
            let k = params.require_usize("k")?;
            (ModelState::Knn(knn::KnnState::fit(rows, &labels, k)), true)
        }
        AlgorithmId::Nb => {
            let usekernel = params.require_bool("usekernel")?;
            (ModelState::Nb(nb::NbState::fit(&rows, &labels, usekernel)), true)
        }
        AlgorithmId::Lreg => {
            let (state, converged) = lreg::LregState::fit(&rows, &labels);
            (ModelState::Lreg(state), converged)
        }
        AlgorithmId::Rf => {
            let mtry = params.require_usize("mtry")?;
            let ntrees =
                params.get("ntrees").and_then(ParamValue::as_usize).unwrap_or(rf::DEFAULT_NTREES);
            (ModelState::Rf(rf::RfState::fit(&rows, &labels, mtry, ntrees, seed)), true)
        }
        AlgorithmId::Svm => {
            let c = params.require_f64("C")?;
            let sigma = params.require_f64("sigma")?;
            let (state, converged) = svm::SvmState::fit(&rows, &labels, c, sigma, seed);
            (ModelState::Svm(state), converged)
        }
        AlgorithmId::Mlp => {
            let neurons = params.require_usize("neurons")?;
            let (state, converged) = mlp::MlpState::fit(&rows, &labels, neurons, seed);
            (ModelState::Mlp(state), converged)
        }
    };

    Ok(TrainedModel { algorithm, params: params.clone(), feature_names, train_seed: seed, converged, state })
}

#[cfg(test)]
mod tests;
