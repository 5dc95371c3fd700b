//! Early-warning prediction of weak students from partial coursework marks.
//!
//! The crate trains six base classifiers on percent-scaled grade data,
//! scores every non-empty classifier subset by its average Gini index over
//! six stratified train/test splits, attaches Monte-Carlo p-values, and
//! selects the best ensemble. Dataset exploration (PCA, permutation
//! importance, decision-boundary grids) and a seeded synthetic-data
//! generator round out the toolkit.
//!
//! Everything here is pure computation on in-memory data. File ingestion,
//! CSV/report emission, and the command-line front end live in the
//! companion `earlybird-cli` crate, which keeps this crate `no_std`
//! compatible (`alloc` required; disable the default `std` feature).

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod analysis;
pub mod dataset;
pub mod ensemble;
pub mod learners;
pub mod math;
pub mod metrics;
pub mod split;
pub mod synth;
pub mod tuning;

pub use dataset::{Dataset, Label, RawDataset, Stage};
pub use learners::{AlgorithmId, ParamPoint, ParamValue, ScoreVector, TrainedModel};
pub use metrics::{CapCurve, ConfusionMetrics, PValue};
pub use split::{FoldPlan, SplitPlan};
