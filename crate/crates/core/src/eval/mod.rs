//! Metrics and the balanced-subsampling cross-validation protocol.

mod experiment;
mod metrics;
mod sampling;

pub use experiment::{
    cells_csv, model_output_labels, run_experiment, summary_csv, CellResult, ChannelSet,
    EvalReport, ExperimentPlan, ModelSummary, Regime,
};
pub use metrics::{confusion, metrics, roc_auc, ConfusionCounts, MetricSet, METRIC_NAMES};
pub use sampling::{balanced_subsample, stratified_kfold};
