//! Classifiers on persistence features and their group-level evaluation.

mod cv;
mod forest;
mod logistic;
mod metrics;

pub use cv::{
    group_cv, make_folds, train_model, Classifier, CvReport, CvScheme, Fold, FoldResult,
    SkippedFold, TrainedModel,
};
pub use forest::{fit_forest, gini, predict_forest, DecisionTree, ForestModel, ForestParams, Node};
pub use logistic::{
    fit_logistic, fit_logistic_with, gradient, log_likelihood, predict_logistic, FitStatus,
    LogisticModel, LogisticOptions,
};
pub use metrics::{balanced_accuracy, Summary};
