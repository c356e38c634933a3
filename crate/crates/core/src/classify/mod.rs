//! Binary classification suite: datasets, standardization, the seven
//! model kinds, and a versioned container for trained models.

mod boosting;
mod dataset;
mod forest;
mod linear;
mod mlp;
mod model;
mod qda;
mod serialize;
mod standardize;
mod tree;

pub use dataset::{LabeledDataset, RowProvenance};
pub use model::{fit, training_accuracy, ModelKind, ModelSpec, TrainedModel};
pub use serialize::{load_model, save_model};
pub use standardize::Standardizer;
