//! Model suite dispatch: specs, fitting, and scoring behind one
//! interface.

use crate::classify::boosting::GbModel;
use crate::classify::dataset::LabeledDataset;
use crate::classify::forest::ForestModel;
use crate::classify::linear::{fit_linear_svm, fit_logistic_regression, LinearModel};
use crate::classify::mlp::MlpModel;
use crate::classify::qda::QdaModel;
use crate::classify::standardize::Standardizer;
use crate::classify::tree::{grow_classification_tree, TreeNode};
use crate::error::{Error, Result};
use ndarray::ArrayView2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModelKind {
    Qda,
    Lr,
    Svm,
    Dt,
    Rf,
    Gb,
    Mlp,
}

impl ModelKind {
    pub const ALL: [ModelKind; 7] = [
        ModelKind::Qda,
        ModelKind::Lr,
        ModelKind::Svm,
        ModelKind::Dt,
        ModelKind::Rf,
        ModelKind::Gb,
        ModelKind::Mlp,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::Qda => "qda",
            ModelKind::Lr => "lr",
            ModelKind::Svm => "svm",
            ModelKind::Dt => "dt",
            ModelKind::Rf => "rf",
            ModelKind::Gb => "gb",
            ModelKind::Mlp => "mlp",
        }
    }

    pub fn parse(s: &str) -> Option<ModelKind> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str() == s.to_ascii_lowercase())
    }

    /// Scores at or above this cut become hard class-1 labels.
    pub fn natural_threshold(self) -> f64 {
        match self {
            ModelKind::Svm => 0.0,
            _ => 0.5,
        }
    }

    fn standardizes(self) -> bool {
        matches!(self, ModelKind::Lr | ModelKind::Svm | ModelKind::Mlp)
    }
}

/// Hyperparameters for one model; `new` fills the per-kind defaults.
/// Fields a kind does not consult are ignored by `fit`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    pub kind: ModelKind,
    pub seed: u64,
    /// Inverse regularization strength (LR, SVM).
    pub c: f64,
    /// Optimizer iteration budget (LR descent steps, SVM subgradient steps).
    pub max_iters: usize,
    /// Tree depth cap (DT, RF, GB).
    pub max_depth: usize,
    /// Ensemble size (RF trees, GB rounds).
    pub n_estimators: usize,
    /// GB shrinkage or MLP Adam step size.
    pub learning_rate: f64,
    /// MLP hidden-layer width.
    pub hidden_units: usize,
    /// MLP training epochs.
    pub epochs: usize,
}

impl ModelSpec {
    pub fn new(kind: ModelKind, seed: u64) -> ModelSpec {
        let mut spec = ModelSpec {
            kind,
            seed,
            c: 1.0,
            max_iters: 5000,
            max_depth: 100,
            n_estimators: 100,
            learning_rate: 0.1,
            hidden_units: 100,
            epochs: 200,
        };
        match kind {
            ModelKind::Svm => spec.max_iters = 2000,
            ModelKind::Rf => spec.max_depth = 10,
            ModelKind::Gb => spec.max_depth = 3,
            ModelKind::Mlp => spec.learning_rate = 1e-3,
            _ => {}
        }
        spec
    }

    /// Applies a `models.<kind>.<key>` configuration override.
    pub fn set_param(&mut self, key: &str, value: &str) -> Result<()> {
        fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
            value.parse().map_err(|_| {
                Error::Validation(format!("invalid value `{value}` for model parameter `{key}`"))
            })
        }
        match key {
            "seed" => self.seed = parse(key, value)?,
            "c" => self.c = parse(key, value)?,
            "max_iters" => self.max_iters = parse(key, value)?,
            "max_depth" => self.max_depth = parse(key, value)?,
            "n_estimators" => self.n_estimators = parse(key, value)?,
            "learning_rate" => self.learning_rate = parse(key, value)?,
            "hidden_units" => self.hidden_units = parse(key, value)?,
            "epochs" => self.epochs = parse(key, value)?,
            _ => {
                return Err(Error::Validation(format!(
                    "unknown model parameter `{key}`"
                )))
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c.is_finite() && self.c > 0.0) {
            return Err(Error::Validation(format!("c must be positive, got {}", self.c)));
        }
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(Error::Validation(format!(
                "learning_rate must be positive, got {}",
                self.learning_rate
            )));
        }
        if self.max_iters == 0 || self.max_depth == 0 || self.n_estimators == 0 {
            return Err(Error::Validation(
                "iteration, depth, and estimator counts must be at least 1".into(),
            ));
        }
        if self.hidden_units == 0 {
            return Err(Error::Validation("hidden_units must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum ModelParams {
    Qda(QdaModel),
    Lr(LinearModel),
    Svm(LinearModel),
    Dt { root: TreeNode },
    Rf(ForestModel),
    Gb(GbModel),
    Mlp(MlpModel),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel {
    pub(crate) n_features: usize,
    pub(crate) standardizer: Option<Standardizer>,
    pub(crate) params: ModelParams,
}

/// Trains one model. Requires at least two samples of each class and at
/// least one feature; scale-sensitive kinds (LR, SVM, MLP) are fit on
/// z-scored features with the statistics kept inside the model.
pub fn fit(spec: &ModelSpec, data: &LabeledDataset) -> Result<TrainedModel> {
    spec.validate()?;
    data.validate()?;
    if data.n_features() == 0 {
        return Err(Error::Validation("dataset has no features".into()));
    }
    let (n_term, n_preterm) = data.class_counts();
    if n_term < 2 || n_preterm < 2 {
        return Err(Error::Unfittable(format!(
            "need at least 2 samples per class, got {n_term} of class 0 and {n_preterm} of class 1"
        )));
    }
    let standardizer = spec.kind.standardizes().then(|| Standardizer::fit(data.x.view()));
    let standardized;
    let x: ArrayView2<'_, f64> = match &standardizer {
        Some(s) => {
            standardized = s.apply(data.x.view());
            standardized.view()
        }
        None => data.x.view(),
    };
    let y = &data.y;
    let params = match spec.kind {
        ModelKind::Qda => ModelParams::Qda(QdaModel::fit(x, y)?),
        ModelKind::Lr => ModelParams::Lr(fit_logistic_regression(x, y, spec.c, spec.max_iters)),
        ModelKind::Svm => ModelParams::Svm(fit_linear_svm(x, y, spec.c, spec.max_iters)),
        ModelKind::Dt => ModelParams::Dt {
            root: grow_classification_tree(
                x,
                y,
                (0..x.nrows()).collect(),
                spec.max_depth,
                None,
                None,
            ),
        },
        ModelKind::Rf => ModelParams::Rf(ForestModel::fit(
            x,
            y,
            spec.n_estimators,
            spec.max_depth,
            spec.seed,
        )),
        ModelKind::Gb => ModelParams::Gb(GbModel::fit(
            x,
            y,
            spec.n_estimators,
            spec.max_depth,
            spec.learning_rate,
        )),
        ModelKind::Mlp => ModelParams::Mlp(MlpModel::fit(
            x,
            y,
            spec.hidden_units,
            spec.epochs,
            spec.learning_rate,
            spec.seed,
        )),
    };
    Ok(TrainedModel {
        n_features: data.n_features(),
        standardizer,
        params,
    })
}

impl TrainedModel {
    pub fn kind(&self) -> ModelKind {
        match &self.params {
            ModelParams::Qda(_) => ModelKind::Qda,
            ModelParams::Lr(_) => ModelKind::Lr,
            ModelParams::Svm(_) => ModelKind::Svm,
            ModelParams::Dt { .. } => ModelKind::Dt,
            ModelParams::Rf(_) => ModelKind::Rf,
            ModelParams::Gb(_) => ModelKind::Gb,
            ModelParams::Mlp(_) => ModelKind::Mlp,
        }
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    /// Probability of class 1 for probabilistic kinds; signed margin for
    /// SVM; leaf class-1 fraction for DT.
    pub fn predict_scores(&self, x: ArrayView2<'_, f64>) -> Result<Vec<f64>> {
        if x.ncols() != self.n_features {
            return Err(Error::ShapeMismatch {
                expected: self.n_features,
                actual: x.ncols(),
            });
        }
        let standardized;
        let x = match &self.standardizer {
            Some(s) => {
                standardized = s.apply(x);
                standardized.view()
            }
            None => x,
        };
        Ok(match &self.params {
            ModelParams::Qda(m) => m.scores(x),
            ModelParams::Lr(m) => m.probabilities(x),
            ModelParams::Svm(m) => m.margins(x),
            ModelParams::Dt { root } => x.rows().into_iter().map(|r| root.predict_row(r)).collect(),
            ModelParams::Rf(m) => m.scores(x),
            ModelParams::Gb(m) => m.scores(x),
            ModelParams::Mlp(m) => m.scores(x),
        })
    }

    /// Hard labels from thresholding `predict_scores` at the kind's
    /// natural cut.
    pub fn predict(&self, x: ArrayView2<'_, f64>) -> Result<Vec<u8>> {
        let cut = self.kind().natural_threshold();
        Ok(self
            .predict_scores(x)?
            .into_iter()
            .map(|s| u8::from(s >= cut))
            .collect())
    }
}

/// Convenience for tests and the evaluation harness.
pub fn training_accuracy(model: &TrainedModel, data: &LabeledDataset) -> Result<f64> {
    let pred = model.predict(data.x.view())?;
    let hits = pred.iter().zip(&data.y).filter(|(p, y)| p == y).count();
    Ok(hits as f64 / data.y.len() as f64)
}
