//! Group-level cross-validation.
//!
//! Folds never split a group: leave-one-group-out tests each group once, the
//! A/B scheme sorts the distinct groups and uses the first half as A and the
//! rest as B. Features are computed per spectrum, so a fold's training
//! matrix depends on its training rows only.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;
use std::time::Instant;

use super::forest::{fit_forest, predict_forest, ForestModel, ForestParams};
use super::logistic::{fit_logistic_with, predict_logistic, LogisticModel, LogisticOptions};
use super::metrics::{balanced_accuracy, Summary};
use crate::error::{check_percentage, Error, Result};
use crate::features::build_matrix_rows;
use crate::spectrum::LabeledDataset;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CvScheme {
    LeaveOneGroupOut,
    TwoFoldAB,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Classifier {
    Logistic { threshold: f64 },
    Forest(ForestParams),
}

#[derive(Debug, Clone, PartialEq)]
pub enum TrainedModel {
    Logistic(LogisticModel),
    Forest(ForestModel),
}

impl TrainedModel {
    pub fn predict(&self, row: &[f64]) -> Result<u8> {
        match self {
            TrainedModel::Logistic(m) => Ok(predict_logistic(m, row)?.1),
            TrainedModel::Forest(m) => predict_forest(m, row),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fold {
    pub name: String,
    pub test_groups: Vec<String>,
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FoldResult {
    pub name: String,
    pub test_groups: Vec<String>,
    pub n_train: usize,
    pub n_test: usize,
    pub balanced_accuracy: f64,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SkippedFold {
    pub name: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CvReport {
    pub folds: Vec<FoldResult>,
    pub skipped: Vec<SkippedFold>,
    pub summary: Summary,
}

/// Distinct groups, numerically ordered when all of them parse as integers.
fn sorted_groups(groups: &[String]) -> Vec<String> {
    let mut distinct: Vec<String> = groups.to_vec();
    distinct.sort();
    distinct.dedup();
    if distinct.iter().all(|g| g.parse::<i64>().is_ok()) {
        distinct.sort_by_key(|g| g.parse::<i64>().unwrap());
    }
    distinct
}

pub fn make_folds(groups: &[String], scheme: CvScheme) -> Result<Vec<Fold>> {
    let distinct = sorted_groups(groups);
    if distinct.len() < 2 {
        return Err(Error::InvalidDataset(format!(
            "cross-validation needs at least 2 groups, found {}",
            distinct.len()
        )));
    }
    let fold_for = |name: String, test_groups: Vec<String>| {
        let (test, train): (Vec<usize>, Vec<usize>) =
            (0..groups.len()).partition(|&i| test_groups.contains(&groups[i]));
        Fold {
            name,
            test_groups,
            train,
            test,
        }
    };
    Ok(match scheme {
        CvScheme::LeaveOneGroupOut => distinct
            .iter()
            .map(|g| fold_for(format!("test {g}"), vec![g.clone()]))
            .collect(),
        CvScheme::TwoFoldAB => {
            let half = distinct.len().div_ceil(2);
            let (a, b) = distinct.split_at(half);
            vec![
                fold_for("Train A".into(), b.to_vec()),
                fold_for("Train B".into(), a.to_vec()),
            ]
        }
    })
}

fn labels_of(dataset: &LabeledDataset, indices: &[usize]) -> Vec<u8> {
    indices.iter().map(|&i| dataset.labels()[i]).collect()
}

/// Fits the classifier on the persistence features of the given rows.
pub fn train_model(
    dataset: &LabeledDataset,
    train: &[usize],
    classifier: &Classifier,
    k: f64,
) -> Result<TrainedModel> {
    let z = build_matrix_rows(dataset, train, k)?;
    let y = labels_of(dataset, train);
    Ok(match classifier {
        Classifier::Logistic { threshold } => {
            let options = LogisticOptions {
                threshold: *threshold,
                ..LogisticOptions::default()
            };
            TrainedModel::Logistic(fit_logistic_with(&z, &y, &options)?)
        }
        Classifier::Forest(params) => TrainedModel::Forest(fit_forest(&z, &y, params)?),
    })
}

pub fn group_cv(
    dataset: &LabeledDataset,
    scheme: CvScheme,
    classifier: &Classifier,
    k: f64,
) -> Result<CvReport> {
    check_percentage(k)?;
    let mut folds = Vec::new();
    let mut skipped = Vec::new();

    for fold in make_folds(dataset.groups(), scheme)? {
        let y_test = labels_of(dataset, &fold.test);
        if !(y_test.contains(&0) && y_test.contains(&1)) {
            let reason = "test set lacks one of the two classes".to_string();
            log::warn!("skipping fold `{}`: {reason}", fold.name);
            skipped.push(SkippedFold {
                name: fold.name,
                reason,
            });
            continue;
        }
        if fold.train.is_empty() {
            skipped.push(SkippedFold {
                name: fold.name,
                reason: "empty training set".into(),
            });
            continue;
        }
        log::info!(
            "fold `{}`: {} training / {} test spectra",
            fold.name,
            fold.train.len(),
            fold.test.len()
        );
        let started = Instant::now();
        let model = train_model(dataset, &fold.train, classifier, k)?;
        let z_test = build_matrix_rows(dataset, &fold.test, k)?;
        let y_pred = z_test
            .rows()
            .map(|row| model.predict(row))
            .collect::<Result<Vec<_>>>()?;
        let ba = balanced_accuracy(&y_test, &y_pred)?;
        folds.push(FoldResult {
            name: fold.name,
            test_groups: fold.test_groups,
            n_train: fold.train.len(),
            n_test: fold.test.len(),
            balanced_accuracy: ba,
            seconds: started.elapsed().as_secs_f64(),
        });
    }

    let values: Vec<f64> = folds.iter().map(|f| f.balanced_accuracy).collect();
    let summary = Summary::from_values(&values)
        .ok_or_else(|| Error::InvalidDataset("no fold had both classes in its test set".into()))?;
    Ok(CvReport {
        folds,
        skipped,
        summary,
    })
}

impl CvReport {
    /// `fold,test_groups,n_train,n_test,balanced_accuracy,seconds` with a header.
    pub fn write_folds_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut text = String::from("fold,test_groups,n_train,n_test,balanced_accuracy,seconds\n");
        for f in &self.folds {
            let _ = writeln!(
                text,
                "{},{},{},{},{},{}",
                f.name,
                f.test_groups.join(";"),
                f.n_train,
                f.n_test,
                f.balanced_accuracy,
                f.seconds
            );
        }
        write_text(path, &text)
    }

    /// `statistic,value` rows for mean, min, max, median and std.
    pub fn write_summary_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let s = &self.summary;
        let text = format!(
            "statistic,value\nmean,{}\nmin,{}\nmax,{}\nmedian,{}\nstd,{}\n",
            s.mean, s.min, s.max, s.median, s.std
        );
        write_text(path.as_ref(), &text)
    }

    /// Human-readable table: per-fold accuracies followed by the statistics.
    pub fn table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{:<24} {:>10}", "fold", "bal. acc.");
        for f in &self.folds {
            let _ = writeln!(out, "{:<24} {:>10.3}", f.name, f.balanced_accuracy);
        }
        for s in &self.skipped {
            let _ = writeln!(out, "{:<24} {:>10}  ({})", s.name, "skipped", s.reason);
        }
        let _ = writeln!(out);
        let _ = writeln!(out, "{:<24} {:>10}", "statistic", "value");
        let s = &self.summary;
        for (name, v) in [
            ("mean", s.mean),
            ("min", s.min),
            ("max", s.max),
            ("median", s.median),
            ("std", s.std),
        ] {
            let _ = writeln!(out, "{name:<24} {v:>10.3}");
        }
        out
    }
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(text.as_bytes())
        .map_err(|e| Error::io(path, e))
}
