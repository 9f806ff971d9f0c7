//! Scoring feature-attribution explanations and detecting encoding.
//!
//! Everything in this crate is `no_std` + `alloc`: data-generating processes
//! with exact joint tables, explainers, conditional and selection models,
//! the scores (ROAR, FRESH, EVAL-X, ENCODE-METER, STRIPE-X), the encoding
//! check, and the simulated benchmark suite. File formats, reports and the
//! command line live in the `stripex` companion crate.

#![no_std]

extern crate alloc;

pub mod bench;
pub mod data;
pub mod dgp;
pub mod error;
pub mod estimators;
pub mod explainers;
pub mod mask;
pub mod math;
pub mod rng;
pub mod scores;
pub mod value;

pub use data::{BinaryLabel, LabeledDataset, Sample, WeightedSamples};
pub use dgp::{AttentionModel, DiscreteDgp, Dgp, DgpSpec, HybridDgp};
pub use error::{Error, Result};
pub use estimators::{Conditional, ConditionalModel};
pub use explainers::{Explainer, ExplainerSpec, SelectionVocabulary};
pub use mask::{Explanation, SelectionMask};
pub use value::{FeatureKind, Schema, Value};
