//! Learned and exact components behind the scores.

pub mod conditional;
pub mod generator;
pub mod learner;
pub mod mi;
pub mod selection;

pub use conditional::{
    Backend, Conditional, ConditionalModel, MaskDistribution, ModelDocument, SurrogateConfig, SurrogateModel,
    TableOracle, MC_RESAMPLES,
};
pub use generator::ConditionalGenerator;
pub use learner::{Classifier, LearnerSpec, Prediction, Row};
pub use mi::mi_plugin;
pub use selection::{SelectionConfig, SelectionModel};
